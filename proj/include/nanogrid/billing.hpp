#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "nanogrid/dispatch.hpp"

namespace nanogrid {

/// Flat volumetric price with a per-kWh export credit.
struct Tariff {
  double volumetric_price_usd_per_kwh = 0.14;
  double export_credit_usd_per_kwh = 0.14;

  void validate() const;
};

struct BillStatement {
  std::string period;  // "YYYY-MM" in the data's local offset
  double import_kwh = 0.0;
  double export_kwh = 0.0;
  double amount_usd = 0.0;  // negative when the utility pays
};

/// Per calendar month: net grid draw house_load - p_house is split into
/// imports and exports step by step, weighted by the timestep.
/// Throws SchemaError when the house load and flows differ in length.
std::vector<BillStatement> monthly_bills(std::span<const StepFlows> flows, const Eigen::VectorXd& house_load_kw,
                                         const Tariff& tariff, double timestep_h);

struct AnnualSummary {
  double annual_usd = 0.0;
  std::vector<BillStatement> by_month;
};

AnnualSummary annual_summary(std::span<const BillStatement> bills);

/// 100 * (baseline - variant) / baseline. Throws UndefinedBaseline for a zero baseline.
double savings_percent(double baseline_usd, double variant_usd);

}  // namespace nanogrid

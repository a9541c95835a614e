#include "nanogrid/billing.hpp"

#include <fmt/format.h>

#include <cmath>

#include "nanogrid/error.hpp"

namespace nanogrid {

void Tariff::validate() const {
  if (!(volumetric_price_usd_per_kwh >= 0.0) || !(export_credit_usd_per_kwh >= 0.0))
    throw InvalidInput("tariff rates must be non-negative");
}

std::vector<BillStatement> monthly_bills(std::span<const StepFlows> flows, const Eigen::VectorXd& house_load_kw,
                                         const Tariff& tariff, double timestep_h) {
  tariff.validate();
  if (static_cast<std::size_t>(house_load_kw.size()) != flows.size())
    throw SchemaError("", 0, fmt::format("house load has {} rows but flows have {}", house_load_kw.size(),
                                         flows.size()));

  std::vector<BillStatement> bills;
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const std::string period = flows[k].timestamp.month_label();
    if (bills.empty() || bills.back().period != period) bills.push_back({period, 0.0, 0.0, 0.0});
    const double net_kw = house_load_kw[static_cast<Eigen::Index>(k)] - flows[k].p_house;
    if (net_kw > 0.0) {
      bills.back().import_kwh += net_kw * timestep_h;
    } else {
      bills.back().export_kwh -= net_kw * timestep_h;
    }
  }
  for (auto& bill : bills) {
    bill.amount_usd = bill.import_kwh * tariff.volumetric_price_usd_per_kwh -
                      bill.export_kwh * tariff.export_credit_usd_per_kwh;
  }
  return bills;
}

AnnualSummary annual_summary(std::span<const BillStatement> bills) {
  AnnualSummary summary;
  summary.by_month.assign(bills.begin(), bills.end());
  for (const auto& b : bills) summary.annual_usd += b.amount_usd;
  return summary;
}

double savings_percent(double baseline_usd, double variant_usd) {
  if (baseline_usd == 0.0 || !std::isfinite(baseline_usd))
    throw UndefinedBaseline("savings are undefined for a zero baseline bill");
  return 100.0 * (baseline_usd - variant_usd) / baseline_usd;
}

}  // namespace nanogrid

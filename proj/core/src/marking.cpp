#include "gasadapt/marking.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

using Entry = std::pair<std::string, double>;

std::vector<Entry> sorted_entries(const PipeValues& values, bool descending) {
  std::vector<Entry> v(values.begin(), values.end());
  std::stable_sort(v.begin(), v.end(), [descending](const Entry& a, const Entry& b) {
    return descending ? a.second > b.second : a.second < b.second;
  });
  return v;
}

double sum_of(const std::vector<Entry>& v) {
  double s = 0.0;
  for (const auto& e : v) s += e.second;
  return s;
}

PipeSet bulk_prefix(const PipeValues& values, double fraction) {
  const auto v = sorted_entries(values, true);
  const double target = fraction * sum_of(v);
  PipeSet out;
  double s = 0.0;
  for (const auto& [id, val] : v) {
    if (s >= target) break;
    out.insert(id);
    s += val;
  }
  return out;
}

PipeSet budget_prefix(const std::vector<Entry>& candidates, double budget) {
  PipeSet out;
  double s = 0.0;
  for (const auto& [id, val] : candidates) {
    if (s + val > budget) break;
    out.insert(id);
    s += val;
  }
  return out;
}

}  // namespace

ModelLevel switch_up_target(ModelLevel level, const std::function<double(ModelLevel)>& eta_m_at, double eps) {
  if (level == ModelLevel::Full) return ModelLevel::Full;
  const ModelLevel next = finer(level);
  if (eta_m_at(level) - eta_m_at(next) > eps) return next;
  return ModelLevel::Full;
}

PipeSet mark_refine(const PipeValues& eta_d, double theta_d) { return bulk_prefix(eta_d, theta_d); }

PipeSet mark_switch_up(const PipeValues& reduction, double theta_m, double eps) {
  PipeValues eligible;
  for (const auto& [id, r] : reduction)
    if (r > eps) eligible.emplace(id, r);
  return bulk_prefix(eligible, theta_m);
}

PipeSet mark_coarsen(const PipeValues& eta_d, double phi_d, const PipeSet& excluded) {
  const auto all = sorted_entries(eta_d, false);
  const double budget = phi_d * sum_of(all);
  std::vector<Entry> candidates;
  for (const auto& e : all)
    if (!excluded.count(e.first)) candidates.push_back(e);
  return budget_prefix(candidates, budget);
}

PipeSet mark_switch_down(const PipeValues& increase, double phi_m, double tau, double eps) {
  std::vector<Entry> eligible;
  for (const auto& e : sorted_entries(increase, false))
    if (e.second <= tau * eps) eligible.push_back(e);
  return budget_prefix(eligible, phi_m * sum_of(eligible));
}

bool is_eps_feasible(std::span<const ErrorEstimate> estimates, double eps) {
  return network_error_summary(estimates) <= eps;
}

}  // namespace gasadapt

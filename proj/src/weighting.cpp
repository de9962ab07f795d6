#include "reportcert/weighting.hpp"

#include <cmath>

#include "reportcert/errors.hpp"

namespace reportcert {

double rep_weight(double smas_var, double vis_mu_mean, double vis_var_mean,
                  const WeightConfig& cfg) {
  const double visual = cfg.beta * (std::exp(vis_mu_mean) + vis_var_mean);
  return std::exp(-(cfg.alpha * smas_var + visual));
}

double sen_weight(double sentence_var, const WeightConfig& cfg) {
  return std::exp(-cfg.gamma * sentence_var);
}

BatchLossBreakdown weighted_batch_loss(const BatchLossInput& input,
                                       const WeightConfig& cfg) {
  BatchLossBreakdown out;
  out.reports.reserve(input.reports.size());
  for (const auto& report : input.reports) {
    if (report.sentence_vars.size() != report.sentence_losses.size())
      throw LengthMismatch("report \"" + report.case_id + "\": " +
                           std::to_string(report.sentence_vars.size()) +
                           " sentence variances vs " +
                           std::to_string(report.sentence_losses.size()) + " losses");
    ReportLossBreakdown row;
    row.case_id = report.case_id;
    row.rep_weight =
        rep_weight(report.smas_var, report.vis_mu_mean, report.vis_var_mean, cfg);
    row.sen_weights.reserve(report.sentence_losses.size());
    for (std::size_t l = 0; l < report.sentence_losses.size(); ++l) {
      const double w = sen_weight(report.sentence_vars[l], cfg);
      row.sen_weights.push_back(w);
      row.weighted_sentence_sum += w * report.sentence_losses[l];
    }
    row.contribution = row.rep_weight * row.weighted_sentence_sum;
    out.rep_term += row.contribution;
    out.reports.push_back(std::move(row));
  }
  out.autoen_term = cfg.lambda_autoen * input.autoen_loss;
  out.total = out.autoen_term + out.rep_term;
  return out;
}

}  // namespace reportcert

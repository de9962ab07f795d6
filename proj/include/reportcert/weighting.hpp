#pragma once

#include <string>
#include <vector>

namespace reportcert {

/// Loss-weighting hyper-parameters; all default to 1.
struct WeightConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double lambda_autoen = 1.0;
};

/// Report-level weight:
///   exp(-(alpha * smas_var + beta * (exp(vis_mu_mean) + vis_var_mean)))
/// where smas_var and vis_var_mean are variances (squared uncertainties).
double rep_weight(double smas_var, double vis_mu_mean, double vis_var_mean,
                  const WeightConfig& cfg);

/// Sentence-level weight: exp(-gamma * sentence_var).
double sen_weight(double sentence_var, const WeightConfig& cfg);

/// Externally supplied per-sentence losses and uncertainty inputs for one
/// report of the batch. Visual means default to 0 when no reconstruction
/// data exists.
struct ReportLossInput {
  std::string case_id;
  std::vector<double> sentence_losses;
  double smas_var = 0.0;
  std::vector<double> sentence_vars;
  double vis_mu_mean = 0.0;
  double vis_var_mean = 0.0;
};

struct BatchLossInput {
  std::vector<ReportLossInput> reports;
  double autoen_loss = 0.0;
};

struct ReportLossBreakdown {
  std::string case_id;
  double rep_weight = 0.0;
  std::vector<double> sen_weights;
  double weighted_sentence_sum = 0.0;  // sum_l sen_weight_l * loss_l
  double contribution = 0.0;           // rep_weight * weighted_sentence_sum
};

struct BatchLossBreakdown {
  std::vector<ReportLossBreakdown> reports;
  double autoen_term = 0.0;
  double rep_term = 0.0;
  double total = 0.0;
};

/// total = lambda_autoen * autoen_loss
///       + sum_r rep_weight_r * sum_l sen_weight_{r,l} * loss_{r,l}.
/// Throws LengthMismatch when a report's variance and loss lists differ.
BatchLossBreakdown weighted_batch_loss(const BatchLossInput& input,
                                       const WeightConfig& cfg);

}  // namespace reportcert

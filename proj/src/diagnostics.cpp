#include "prmmc/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prmmc {

namespace {

Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

/// Log pseudo-determinant: sum of log eigenvalues above a relative floor.
/// Sets `degenerate` when any eigenvalue falls below it.
double log_pdet(const Eigen::MatrixXd& m, bool& degenerate) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  const double floor =
      std::max(ev.cwiseAbs().maxCoeff(), 0.0) * m.rows() *
      std::numeric_limits<double>::epsilon();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > floor && floor > 0.0)
      logdet += std::log(ev[i]);
    else
      degenerate = true;
  }
  return logdet;
}

}  // namespace

EssReport mess(const Eigen::MatrixXd& chain, double wall_seconds) {
  const long n = chain.rows();
  const int p = static_cast<int>(chain.cols());
  if (n < 4 || p < 1) throw std::domain_error("chain too short for mESS");
  const long b = static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
  const long a = n / b;
  if (a < 2) throw std::domain_error("fewer than two complete batches");

  EssReport rep;
  rep.n = n;
  rep.p = p;

  const Eigen::MatrixXd lambda = covariance(chain.topRows(a * b));
  Eigen::MatrixXd means(a, p);
  for (long j = 0; j < a; ++j)
    means.row(j) = chain.middleRows(j * b, b).colwise().mean();
  const Eigen::MatrixXd sigma = static_cast<double>(b) * covariance(means);

  rep.log_det_lambda = log_pdet(lambda, rep.degenerate);
  rep.log_det_sigma = log_pdet(sigma, rep.degenerate);
  rep.mess = static_cast<double>(n) *
             std::exp((rep.log_det_lambda - rep.log_det_sigma) / p);
  rep.wall_seconds = wall_seconds;
  if (wall_seconds >= 0.0 && rep.mess > 0.0)
    rep.seconds_per_ess = wall_seconds / rep.mess;
  return rep;
}

Eigen::MatrixXd embed_chain_for_mess(const std::vector<double>& beta,
                                     const std::vector<std::array<double, 2>>& free_ics,
                                     const std::vector<std::vector<State>>& at_datapoints,
                                     int comp_s, int comp_i) {
  const std::size_t n = beta.size();
  if (free_ics.size() != n || at_datapoints.size() != n)
    throw std::domain_error("embedding inputs disagree on sample count");
  const std::size_t m = n ? at_datapoints[0].size() : 0;
  Eigen::MatrixXd out(n, 3 + 2 * m);
  for (std::size_t s = 0; s < n; ++s) {
    if (at_datapoints[s].size() != m)
      throw std::domain_error("inconsistent datapoint count across samples");
    out(s, 0) = beta[s];
    out(s, 1) = free_ics[s][0];
    out(s, 2) = free_ics[s][1];
    for (std::size_t i = 0; i < m; ++i) {
      out(s, 3 + 2 * i) = static_cast<double>(at_datapoints[s][i][comp_s]);
      out(s, 3 + 2 * i + 1) = static_cast<double>(at_datapoints[s][i][comp_i]);
    }
  }
  return out;
}

AcfResult acf(const std::vector<double>& series, int max_lag) {
  const long n = static_cast<long>(series.size());
  if (n <= max_lag || max_lag < 0)
    throw std::domain_error("series shorter than requested lag range");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  AcfResult res;
  res.corr.assign(max_lag + 1, std::numeric_limits<double>::quiet_NaN());
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(n);
  res.corr[0] = 1.0;
  if (c0 == 0.0) {
    res.zero_variance = true;
    return res;
  }
  for (int h = 1; h <= max_lag; ++h) {
    double ch = 0.0;
    for (long t = 0; t + h < n; ++t)
      ch += (series[t] - mean) * (series[t + h] - mean);
    res.corr[h] = ch / static_cast<double>(n) / c0;
  }
  return res;
}

ResidualSummary residual_summary(const std::vector<std::vector<double>>& densities,
                                 const std::vector<double>& t_lo,
                                 const std::vector<double>& t_hi, int event,
                                 int max_lag) {
  const std::size_t n = densities.size();
  if (n < 2) throw std::domain_error("need at least two posterior samples");
  const std::size_t s = t_lo.size();
  if (t_hi.size() != s) throw std::domain_error("slice bounds disagree");

  ResidualSummary out;
  out.event = event;
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  out.mean.assign(s, 0.0);
  out.sd.assign(s, 0.0);
  out.flag.assign(s, 0);
  for (const auto& row : densities)
    if (row.size() != s) throw std::domain_error("density row/slice mismatch");

  for (std::size_t j = 0; j < s; ++j) {
    double m = 0.0;
    for (const auto& row : densities) m += row[j];
    m /= static_cast<double>(n);
    double v = 0.0;
    for (const auto& row : densities) v += (row[j] - m) * (row[j] - m);
    v /= static_cast<double>(n - 1);
    out.mean[j] = m;
    out.sd[j] = std::sqrt(v);
    if (m > 1.0 + 3.0 * out.sd[j]) out.flag[j] = 1;
    else if (m < 1.0 - 3.0 * out.sd[j]) out.flag[j] = -1;
  }
  const int lag = std::min<int>(max_lag, static_cast<int>(s) - 1);
  out.acf_of_mean = acf(out.mean, std::max(lag, 0));
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("slope needs at least two points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw std::domain_error("log-log needs positives");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("degenerate x values");
  return sxy / sxx;
}

}  // namespace prmmc

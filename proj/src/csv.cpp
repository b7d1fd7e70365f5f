#include "prmmc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace prmmc {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << std::setprecision(17);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return f;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void expect_header(std::ifstream& f, const std::string& path, const std::string& want) {
  std::string line;
  if (!std::getline(f, line)) fail(path, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != want) fail(path, 1, "expected header '" + want + "', got '" + line + "'");
}

double to_double(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(path, line, "bad number '" + s + "'");
  }
}

std::int64_t to_int(const std::string& s, const std::string& path, std::size_t line) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(path, line, "bad integer '" + s + "'");
  return v;
}

struct LineReader {
  std::ifstream f;
  std::string path;
  std::size_t lineno = 1;
  std::string buf;

  bool next(std::vector<std::string>& fields, std::size_t want) {
    if (!std::getline(f, buf)) return false;
    ++lineno;
    if (!buf.empty() && buf.back() == '\r') buf.pop_back();
    if (buf.empty()) return next(fields, want);
    fields = split(buf);
    if (fields.size() != want)
      fail(path, lineno, "expected " + std::to_string(want) + " fields, got " +
                             std::to_string(fields.size()));
    return true;
  }
};

LineReader reader_with_header(const std::string& path, const std::string& header) {
  LineReader r{open_in(path), path};
  expect_header(r.f, path, header);
  return r;
}

std::string state_row(const ModelSpec& model, const State& s, const Counters& c) {
  std::ostringstream os;
  for (int i = 0; i < model.dim; ++i) os << ',' << s[i];
  for (int i = 0; i < model.counter_count(); ++i) os << ',' << c[i];
  return os.str();
}

std::string traj_header(const ModelSpec& model) {
  std::string h = "time";
  for (const auto& n : model.comp_names) h += "," + n;
  for (const auto& c : model.counters) h += "," + c.name;
  return h;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const ModelSpec& model,
                          const Trajectory& traj) {
  auto f = open_out(path);
  f << traj_header(model) << "\n";
  f << 0.0 << state_row(model, traj.initial_state(), Counters{}) << "\n";
  for (const JumpRecord& j : traj.jumps())
    f << j.t << state_row(model, j.state_after, j.counters_after) << "\n";
}

void write_trajectory_at_csv(const std::string& path, const ModelSpec& model,
                             const Trajectory& traj, const std::vector<double>& times) {
  auto f = open_out(path);
  f << traj_header(model) << "\n";
  const auto states = traj.states_at(times);
  const auto counters = traj.counters_at(times);
  for (std::size_t i = 0; i < times.size(); ++i)
    f << times[i] << state_row(model, states[i], counters[i]) << "\n";
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  auto f = open_out(path);
  f << "time,count\n";
  for (std::size_t i = 0; i < data.times.size(); ++i)
    f << data.times[i] << ',' << data.counts[i] << "\n";
}

Dataset read_dataset_csv(const std::string& path, DataKind kind) {
  auto r = reader_with_header(path, "time,count");
  Dataset d;
  d.kind = kind;
  std::vector<std::string> fields;
  while (r.next(fields, 2)) {
    d.times.push_back(to_double(fields[0], path, r.lineno));
    d.counts.push_back(to_int(fields[1], path, r.lineno));
  }
  return d;
}

void write_chain_csv(const std::string& path, const ChainOutput& out) {
  auto f = open_out(path);
  f << "iteration,logpost,loglik";
  for (const auto& n : out.names) f << ',' << n;
  f << "\n";
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    f << out.iters[i] << ',' << out.loglik[i] + out.logprior[i] << ',' << out.loglik[i];
    for (double v : out.samples[i]) f << ',' << v;
    f << "\n";
  }
}

std::vector<double> ChainCsv::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) {
      std::vector<double> col(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i][j];
      return col;
    }
  throw std::runtime_error("chain has no column '" + name + "'");
}

ChainCsv read_chain_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) fail(path, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto cols = split(line);
  if (cols.size() < 3 || cols[0] != "iteration" || cols[1] != "logpost" ||
      cols[2] != "loglik")
    fail(path, 1, "unexpected chain header");
  ChainCsv out;
  out.names.assign(cols.begin() + 3, cols.end());
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != cols.size()) fail(path, lineno, "ragged row");
    out.iters.push_back(to_int(fields[0], path, lineno));
    out.logpost.push_back(to_double(fields[1], path, lineno));
    out.loglik.push_back(to_double(fields[2], path, lineno));
    std::vector<double> row(out.names.size());
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = to_double(fields[3 + j], path, lineno);
    out.samples.push_back(std::move(row));
  }
  return out;
}

void write_nu_counts_csv(const std::string& path, const ChainOutput& out) {
  auto f = open_out(path);
  f << "sample,event,slice,t_lo,t_hi,cap,count\n";
  for (std::size_t s = 0; s < out.nu_counts.size(); ++s)
    for (std::size_t k = 0; k < out.nu_counts[s].size(); ++k)
      for (std::size_t j = 0; j < out.nu_counts[s][k].size(); ++j)
        f << s << ',' << k << ',' << j << ',' << out.slice_t_lo[j] << ','
          << out.slice_t_hi[j] << ',' << out.caps[k][j] << ','
          << out.nu_counts[s][k][j] << "\n";
}

NuDensities read_nu_counts_csv(const std::string& path) {
  auto r = reader_with_header(path, "sample,event,slice,t_lo,t_hi,cap,count");
  NuDensities out;
  std::vector<std::string> fields;
  while (r.next(fields, 7)) {
    const auto s = static_cast<std::size_t>(to_int(fields[0], path, r.lineno));
    const auto k = static_cast<std::size_t>(to_int(fields[1], path, r.lineno));
    const auto j = static_cast<std::size_t>(to_int(fields[2], path, r.lineno));
    const double lo = to_double(fields[3], path, r.lineno);
    const double hi = to_double(fields[4], path, r.lineno);
    const double cap = to_double(fields[5], path, r.lineno);
    const double count = static_cast<double>(to_int(fields[6], path, r.lineno));
    if (k >= out.density.size()) {
      out.density.resize(k + 1);
      out.caps.resize(k + 1);
    }
    if (j >= out.caps[k].size()) out.caps[k].resize(j + 1, 0.0);
    out.caps[k][j] = cap;
    if (j >= out.t_lo.size()) {
      out.t_lo.resize(j + 1, 0.0);
      out.t_hi.resize(j + 1, 0.0);
    }
    out.t_lo[j] = lo;
    out.t_hi[j] = hi;
    auto& rows = out.density[k];
    if (s >= rows.size()) rows.resize(s + 1);
    if (j >= rows[s].size()) rows[s].resize(j + 1, 0.0);
    if (cap <= 0.0 || hi <= lo) fail(path, r.lineno, "bad slice geometry");
    rows[s][j] = count / ((hi - lo) * cap);
  }
  for (auto& rows : out.density)
    for (auto& row : rows)
      if (row.size() != out.t_lo.size())
        throw std::runtime_error(path + ": ragged slice table");
  return out;
}

void write_traj_obs_csv(const std::string& path, const ModelSpec& model,
                        const ChainOutput& out) {
  auto f = open_out(path);
  f << "sample,time";
  for (const auto& n : model.comp_names) f << ',' << n;
  f << "\n";
  for (std::size_t s = 0; s < out.traj_at_obs.size(); ++s)
    for (std::size_t i = 0; i < out.obs_times.size(); ++i) {
      f << s << ',' << out.obs_times[i];
      for (int c = 0; c < model.dim; ++c) f << ',' << out.traj_at_obs[s][i][c];
      f << "\n";
    }
}

TrajObsCsv read_traj_obs_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) fail(path, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto cols = split(line);
  if (cols.size() < 3 || cols[0] != "sample" || cols[1] != "time")
    fail(path, 1, "unexpected snapshot header");
  TrajObsCsv out;
  out.comp_names.assign(cols.begin() + 2, cols.end());
  if (out.comp_names.size() > static_cast<std::size_t>(kMaxComp))
    fail(path, 1, "too many compartments");
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != cols.size()) fail(path, lineno, "ragged row");
    const auto s = static_cast<std::size_t>(to_int(fields[0], path, lineno));
    const double t = to_double(fields[1], path, lineno);
    State st{};
    for (std::size_t c = 0; c < out.comp_names.size(); ++c)
      st[c] = to_int(fields[2 + c], path, lineno);
    if (s >= out.states.size()) out.states.resize(s + 1);
    if (s == 0) out.times.push_back(t);
    out.states[s].push_back(st);
  }
  for (const auto& row : out.states)
    if (row.size() != out.times.size())
      throw std::runtime_error(path + ": ragged snapshot table");
  return out;
}

void write_measure_records_csv(const std::string& path,
                               const std::vector<MeasureRecord>& records) {
  auto f = open_out(path);
  f << "event,column,level,t,u\n";
  for (const MeasureRecord& r : records)
    f << r.event << ',' << r.column << ',' << r.level << ',' << r.t << ',' << r.u
      << "\n";
}

std::vector<MeasureRecord> read_measure_records_csv(const std::string& path) {
  auto r = reader_with_header(path, "event,column,level,t,u");
  std::vector<MeasureRecord> out;
  std::vector<std::string> fields;
  while (r.next(fields, 5)) {
    MeasureRecord rec;
    rec.event = static_cast<int>(to_int(fields[0], path, r.lineno));
    rec.column = static_cast<int>(to_int(fields[1], path, r.lineno));
    rec.level = static_cast<int>(to_int(fields[2], path, r.lineno));
    rec.t = to_double(fields[3], path, r.lineno);
    rec.u = to_double(fields[4], path, r.lineno);
    out.push_back(rec);
  }
  return out;
}

void write_residual_csv(const std::string& path,
                        const std::vector<ResidualSummary>& summaries) {
  auto f = open_out(path);
  f << "event,slice,t_lo,t_hi,mean,sd,flag\n";
  for (const ResidualSummary& rs : summaries)
    for (std::size_t j = 0; j < rs.mean.size(); ++j)
      f << rs.event << ',' << j << ',' << rs.t_lo[j] << ',' << rs.t_hi[j] << ','
        << rs.mean[j] << ',' << rs.sd[j] << ',' << rs.flag[j] << "\n";
}

void write_acf_csv(const std::string& path,
                   const std::vector<std::pair<int, AcfResult>>& per_event) {
  auto f = open_out(path);
  f << "event,lag,corr\n";
  for (const auto& [event, res] : per_event)
    for (std::size_t h = 0; h < res.corr.size(); ++h)
      f << event << ',' << h << ',' << res.corr[h] << "\n";
}

void write_ess_json(const std::string& path, const EssReport& report) {
  auto f = open_out(path);
  f << "{\n"
    << "  \"n\": " << report.n << ",\n"
    << "  \"p\": " << report.p << ",\n"
    << "  \"log_det_lambda\": " << report.log_det_lambda << ",\n"
    << "  \"log_det_sigma\": " << report.log_det_sigma << ",\n"
    << "  \"mess\": " << report.mess << ",\n"
    << "  \"degenerate\": " << (report.degenerate ? "true" : "false") << ",\n"
    << "  \"wall_seconds\": " << report.wall_seconds << ",\n"
    << "  \"seconds_per_ess\": " << report.seconds_per_ess << "\n"
    << "}\n";
}

}  // namespace prmmc

#include "jlcid/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "jlcid/errors.hpp"

namespace jlcid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_no;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  Table t;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (ln == 1) {
      t.header = fields;
      continue;
    }
    if (fields.size() != t.header.size())
      throw data_error(path + " line " + std::to_string(ln) + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_no.push_back(ln);
  }
  if (t.header.empty()) throw data_error(path + ": empty file");
  return t;
}

int column(const Table& t, const std::string& path, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw data_error(path + ": missing column '" + name + "'");
  return static_cast<int>(it - t.header.begin());
}

double parse_num(const std::string& s, const std::string& path, int line,
                 const std::string& col) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0')
    throw data_error(path + " line " + std::to_string(line) + ": bad value '" + s +
                     "' in column " + col);
  return v;
}

std::string fmt(double v) {
  if (v == kInf) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_dataset(const std::string& events_path, const std::string& obs_path,
                     const ModelSpec& spec) {
  spec.validate();
  Table ev = read_table(events_path);
  const int c_id = column(ev, events_path, "id");
  const int c_t0 = column(ev, events_path, "t0");
  const int c_l = column(ev, events_path, "l");
  const int c_r = column(ev, events_path, "r");
  const int c_da = column(ev, events_path, "delta_a");
  const int c_t = column(ev, events_path, "t");
  const int c_dd = column(ev, events_path, "delta_d");
  std::vector<int> class_cols, w_cols[3];
  for (const auto& name : spec.class_covariates)
    class_cols.push_back(column(ev, events_path, name));
  for (int tr = 0; tr < spec.n_transitions(); ++tr)
    for (const auto& name : spec.event_covariates[tr])
      w_cols[tr].push_back(column(ev, events_path, name));

  Dataset data;
  std::map<long long, std::size_t> index;
  for (std::size_t i = 0; i < ev.rows.size(); ++i) {
    const auto& row = ev.rows[i];
    int ln = ev.line_no[i];
    SubjectRecord rec;
    rec.id = static_cast<long long>(parse_num(row[c_id], events_path, ln, "id"));
    if (index.count(rec.id))
      throw data_error(events_path + " line " + std::to_string(ln) + ": duplicate subject id=" +
                       std::to_string(rec.id));
    rec.t0 = parse_num(row[c_t0], events_path, ln, "t0");
    rec.l = parse_num(row[c_l], events_path, ln, "l");
    rec.r = row[c_r].empty() ? kInf : parse_num(row[c_r], events_path, ln, "r");
    rec.delta_a = static_cast<int>(parse_num(row[c_da], events_path, ln, "delta_a"));
    rec.t_end = parse_num(row[c_t], events_path, ln, "t");
    rec.delta_d = static_cast<int>(parse_num(row[c_dd], events_path, ln, "delta_d"));
    rec.class_covs.resize(static_cast<int>(class_cols.size()));
    for (std::size_t c = 0; c < class_cols.size(); ++c)
      rec.class_covs[static_cast<int>(c)] =
          parse_num(row[static_cast<std::size_t>(class_cols[c])], events_path, ln, "covariate");
    for (int tr = 0; tr < 3; ++tr) {
      int nw = tr < spec.n_transitions() ? static_cast<int>(w_cols[tr].size()) : 0;
      rec.w[tr].resize(nw);
      for (int c = 0; c < nw; ++c)
        rec.w[tr][c] = parse_num(row[static_cast<std::size_t>(w_cols[tr][static_cast<std::size_t>(c)])],
                                 events_path, ln, "covariate");
    }
    index[rec.id] = data.size();
    data.push_back(std::move(rec));
  }

  Table ob = read_table(obs_path);
  const int o_id = column(ob, obs_path, "id");
  const int o_mk = column(ob, obs_path, "marker");
  const int o_time = column(ob, obs_path, "time");
  const int o_val = column(ob, obs_path, "value");
  std::vector<int> ocov_cols;
  for (const auto& name : spec.obs_covariates) ocov_cols.push_back(column(ob, obs_path, name));

  struct Obs {
    int marker;
    double time, value;
    std::vector<double> covs;
  };
  std::map<long long, std::vector<Obs>> by_subject;
  for (std::size_t i = 0; i < ob.rows.size(); ++i) {
    const auto& row = ob.rows[i];
    int ln = ob.line_no[i];
    if (row[static_cast<std::size_t>(o_val)].empty()) continue;  // missing marker value
    long long id = static_cast<long long>(parse_num(row[o_id], obs_path, ln, "id"));
    if (!index.count(id))
      throw data_error(obs_path + " line " + std::to_string(ln) + ": unknown subject id=" +
                       std::to_string(id));
    Obs o;
    o.marker = static_cast<int>(parse_num(row[o_mk], obs_path, ln, "marker")) - 1;
    o.time = parse_num(row[o_time], obs_path, ln, "time");
    o.value = parse_num(row[o_val], obs_path, ln, "value");
    for (int c : ocov_cols)
      o.covs.push_back(parse_num(row[static_cast<std::size_t>(c)], obs_path, ln, "covariate"));
    by_subject[id].push_back(std::move(o));
  }

  for (auto& rec : data) {
    auto it = by_subject.find(rec.id);
    const int n = it == by_subject.end() ? 0 : static_cast<int>(it->second.size());
    rec.obs_marker.resize(static_cast<std::size_t>(n));
    rec.obs_time.resize(n);
    rec.obs_value.resize(n);
    rec.obs_covs.resize(n, static_cast<int>(spec.obs_covariates.size()));
    for (int j = 0; j < n; ++j) {
      const Obs& o = it->second[static_cast<std::size_t>(j)];
      rec.obs_marker[static_cast<std::size_t>(j)] = o.marker;
      rec.obs_time[j] = spec.long_time.apply(o.time);
      rec.obs_value[j] = o.value;
      for (std::size_t c = 0; c < o.covs.size(); ++c)
        rec.obs_covs(j, static_cast<int>(c)) = o.covs[c];
    }
    build_designs(rec, spec);
    rec.validate(spec);
  }
  return data;
}

void write_dataset(const std::string& events_path, const std::string& obs_path,
                   const Dataset& data, const ModelSpec& spec) {
  // unique covariate columns, class covariates first
  std::vector<std::string> cov_names;
  auto add = [&](const std::string& n) {
    if (std::find(cov_names.begin(), cov_names.end(), n) == cov_names.end())
      cov_names.push_back(n);
  };
  for (const auto& n : spec.class_covariates) add(n);
  for (int tr = 0; tr < spec.n_transitions(); ++tr)
    for (const auto& n : spec.event_covariates[tr]) add(n);

  auto value_of = [&](const SubjectRecord& rec, const std::string& name) {
    for (std::size_t c = 0; c < spec.class_covariates.size(); ++c)
      if (spec.class_covariates[c] == name) return rec.class_covs[static_cast<int>(c)];
    for (int tr = 0; tr < spec.n_transitions(); ++tr)
      for (std::size_t c = 0; c < spec.event_covariates[tr].size(); ++c)
        if (spec.event_covariates[tr][c] == name) return rec.w[tr][static_cast<int>(c)];
    throw data_error("write_dataset: covariate '" + name + "' not stored on the record");
  };

  std::ofstream ev(events_path);
  if (!ev) throw data_error("cannot write " + events_path);
  ev << "id,t0,l,r,delta_a,t,delta_d";
  for (const auto& n : cov_names) ev << "," << n;
  ev << "\n";
  for (const auto& rec : data) {
    ev << rec.id << "," << fmt(rec.t0) << "," << fmt(rec.l) << "," << fmt(rec.r) << ","
       << rec.delta_a << "," << fmt(rec.t_end) << "," << rec.delta_d;
    for (const auto& n : cov_names) ev << "," << fmt(value_of(rec, n));
    ev << "\n";
  }

  std::ofstream ob(obs_path);
  if (!ob) throw data_error("cannot write " + obs_path);
  ob << "id,marker,time,value";
  for (const auto& n : spec.obs_covariates) ob << "," << n;
  ob << "\n";
  for (const auto& rec : data)
    for (int j = 0; j < rec.n_obs(); ++j) {
      ob << rec.id << "," << rec.obs_marker[static_cast<std::size_t>(j)] + 1 << ","
         << fmt(spec.long_time.invert(rec.obs_time[j])) << "," << fmt(rec.obs_value[j]);
      for (int c = 0; c < rec.obs_covs.cols(); ++c) ob << "," << fmt(rec.obs_covs(j, c));
      ob << "\n";
    }
}

}  // namespace jlcid

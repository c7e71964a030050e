#include "uavmac/cli/compare.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace uavmac::cli {

namespace {

double to_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error("bad-csv", "not a number: '" + text + "'");
  return v;
}

using Key = std::vector<std::string>;

// key -> chosen throughput, picking the preferred column first.
std::map<Key, double> collect(const CsvTable& t, const std::vector<int>& key_idx,
                              const std::string& preferred, const std::string& fallback,
                              const std::string& name) {
  const int pref = t.column(preferred);
  const int fall = t.column(fallback);
  if (pref < 0 && fall < 0)
    throw Error("join", name + ": no " + preferred + " or " + fallback + " column");
  std::map<Key, double> primary, secondary;
  for (const auto& row : t.rows) {
    Key k;
    for (int i : key_idx) k.push_back(row[static_cast<std::size_t>(i)]);
    if (pref >= 0 && !row[static_cast<std::size_t>(pref)].empty()) {
      if (!primary.emplace(k, to_double(row[static_cast<std::size_t>(pref)])).second)
        throw Error("join", name + ": duplicate " + preferred + " rows for one parameter set");
    } else if (fall >= 0 && !row[static_cast<std::size_t>(fall)].empty()) {
      if (!secondary.emplace(k, to_double(row[static_cast<std::size_t>(fall)])).second)
        throw Error("join", name + ": duplicate " + fallback + " rows for one parameter set");
    }
  }
  for (auto& [k, v] : secondary) primary.emplace(k, v);
  return primary;
}

std::string join_key(const Key& k) {
  std::string s;
  for (const auto& part : k) {
    if (!s.empty()) s += ',';
    s += part;
  }
  return s;
}

}  // namespace

CompareReport compare(const CsvTable& a, const CsvTable& b, double threshold) {
  if (!(threshold >= 0.0)) throw Error("bad-threshold", "threshold must be >= 0");
  CompareReport rep;
  rep.threshold = threshold;
  std::vector<int> ia, ib;
  for (const auto& key : echo_keys()) {
    const int ca = a.column(key);
    const int cb = b.column(key);
    if (ca < 0 && cb < 0) continue;
    if (ca < 0 || cb < 0) throw Error("join", "column '" + key + "' is missing from one file");
    rep.key_columns.push_back(key);
    ia.push_back(ca);
    ib.push_back(cb);
  }
  if (rep.key_columns.empty()) throw Error("join", "the files share no parameter columns");

  const auto va = collect(a, ia, "throughput", "throughput_sim", "first file");
  const auto vb = collect(b, ib, "throughput_sim", "throughput", "second file");

  std::vector<std::string> unmatched;
  for (const auto& [k, v] : va) {
    if (!vb.count(k)) unmatched.push_back("only in first: " + join_key(k));
  }
  for (const auto& [k, v] : vb) {
    if (!va.count(k)) unmatched.push_back("only in second: " + join_key(k));
  }
  if (!unmatched.empty()) {
    std::string msg = std::to_string(unmatched.size()) + " unmatched parameter set(s): ";
    for (std::size_t i = 0; i < unmatched.size(); ++i) {
      if (i) msg += " | ";
      msg += unmatched[i];
    }
    throw Error("join", msg);
  }
  if (va.empty()) throw Error("join", "no rows to compare");

  double total = 0.0;
  for (const auto& [k, v] : va) {
    CompareRow r{k, v, vb.at(k), std::abs(v - vb.at(k))};
    rep.max_gap = std::max(rep.max_gap, r.gap);
    total += r.gap;
    rep.rows.push_back(std::move(r));
  }
  rep.mean_gap = total / static_cast<double>(rep.rows.size());
  rep.pass = rep.max_gap <= threshold;
  return rep;
}

std::string format_report(const CompareReport& report) {
  std::string out;
  for (const auto& k : report.key_columns) out += k + ',';
  out += "s_a,s_b,gap\n";
  for (const auto& r : report.rows) {
    for (const auto& k : r.key) out += k + ',';
    out += format_number(r.a) + ',' + format_number(r.b) + ',' + format_number(r.gap) + '\n';
  }
  out += "# rows=" + std::to_string(report.rows.size()) +
         " max_gap=" + format_number(report.max_gap) +
         " mean_gap=" + format_number(report.mean_gap) +
         " threshold=" + format_number(report.threshold) +
         " result=" + (report.pass ? "pass" : "fail") + '\n';
  return out;
}

}  // namespace uavmac::cli

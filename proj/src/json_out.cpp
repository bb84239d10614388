#include "dualcurve/json_out.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dualcurve {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << json(it.key()).dump() << ": ";
        write(os, it.value(), indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep a float visibly a float
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

json to_json(const RngSeed& s) { return {{"seed", s.seed}, {"stream", s.stream}}; }

json to_json(const MeasureEstimate& e) {
  return {{"value", number_or_null(e.value)},
          {"abs_error", number_or_null(e.abs_error)},
          {"engine", to_string(e.engine)},
          {"q", e.q},
          {"body", e.body},
          {"selection", e.selection},
          {"nodes_or_samples", e.nodes_or_samples}};
}

json to_json(const RatioReport& r) {
  return {{"ratio", number_or_null(r.ratio)},
          {"ratio_error", number_or_null(r.ratio_error)},
          {"bound", r.bound},
          {"bound_kind", to_string(r.bound_kind)},
          {"satisfied", r.satisfied},
          {"margin", number_or_null(r.margin)},
          {"subspace", to_json(r.subspace)},
          {"total", to_json(r.total)}};
}

json to_json(const InequalityReport& r) {
  json j = {{"lhs", number_or_null(r.lhs)},
            {"rhs", number_or_null(r.rhs)},
            {"margin", number_or_null(r.margin)},
            {"holds", r.holds},
            {"equality_case", to_string(r.equality_case)},
            {"tol_abs", r.tol_abs},
            {"tol_rel", r.tol_rel},
            {"scale", number_or_null(r.scale)}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const TrialRecord& r) {
  return {{"trial", r.trial},
          {"description", r.description},
          {"lhs", number_or_null(r.lhs)},
          {"rhs", number_or_null(r.rhs)},
          {"margin", number_or_null(r.margin)},
          {"tolerance", r.tolerance},
          {"holds", r.holds},
          {"equality", r.equality}};
}

json to_json(const FuzzSummary& s, bool with_records) {
  json hist = json::object();
  const auto labels = margin_bin_labels();
  for (std::size_t i = 0; i < labels.size() && i < s.histogram.size(); ++i) hist[labels[i]] = s.histogram[i];
  json j = {{"suite", s.suite},
            {"trials", s.trials},
            {"checks", s.checks},
            {"violations", s.violations},
            {"rechecked", s.rechecked},
            {"strict_positive", s.strict_positive},
            {"worst_margin", number_or_null(s.worst_margin)},
            {"margin_histogram", hist},
            {"notes", s.notes},
            {"seed", to_json(s.seed)}};
  if (with_records) {
    json recs = json::array();
    for (const auto& r : s.records) recs.push_back(to_json(r));
    j["records"] = recs;
  }
  return j;
}

json to_json(const CylinderSweep& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"l", r.l}, {"subspace", r.subspace}, {"total", r.total}, {"ratio", r.ratio},
                    {"ratio_error", r.ratio_error}, {"bound", r.bound}, {"margin", r.margin}});
  }
  return {{"q", s.q}, {"n", s.n}, {"k", s.k}, {"limit", s.limit}, {"rows", rows}, {"all_below", s.all_below},
          {"monotone", s.monotone}, {"blips", s.blips}, {"final_gap", s.final_gap}, {"passed", s.passed()}};
}

}  // namespace dualcurve

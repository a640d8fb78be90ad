#include "amentropy/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "amentropy/common.hpp"
#include "json.hpp"

namespace amentropy {

EmitFormat parse_emit_format(const std::string& name) {
  if (name == "csv") return EmitFormat::csv;
  if (name == "jsonl") return EmitFormat::jsonl;
  throw validation_error("emit format must be 'csv' or 'jsonl', got '" + name + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void canonical_sort(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.command, a.scenario, a.quantity, a.n, a.params) <
           std::tie(b.command, b.scenario, b.quantity, b.n, b.params);
  });
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_results(std::vector<ResultRow> rows, EmitFormat fmt) {
  canonical_sort(rows);
  std::string out;
  if (fmt == EmitFormat::csv) {
    out = "command,scenario,params,quantity,n,value,tol,anchor\n";
    for (const ResultRow& r : rows) {
      out += csv_escape(r.command) + ',' + csv_escape(r.scenario) + ',' +
             csv_escape(r.params) + ',' + csv_escape(r.quantity) + ',';
      if (r.n >= 0) out += std::to_string(r.n);
      out += ',' + format_double(r.value) + ',' + csv_escape(r.tol) + ',' +
             csv_escape(r.anchor) + '\n';
    }
    return out;
  }
  for (const ResultRow& r : rows) {
    nlohmann::json j;
    j["command"] = r.command;
    j["scenario"] = r.scenario;
    j["params"] = r.params;
    j["quantity"] = r.quantity;
    if (r.n >= 0)
      j["n"] = r.n;
    else
      j["n"] = nullptr;
    j["value"] = r.value;
    j["tol"] = r.tol;
    j["anchor"] = r.anchor;
    out += j.dump() + '\n';
  }
  return out;
}

void write_results(std::vector<ResultRow> rows, EmitFormat fmt, const std::string& path) {
  std::string text = render_results(std::move(rows), fmt);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + path);
  out << text;
}

}  // namespace amentropy

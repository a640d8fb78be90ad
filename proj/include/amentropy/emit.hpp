#pragma once

#include <string>
#include <vector>

namespace amentropy {

// One emitted data point. `params` echoes the flags that produced it as
// space-separated key=value pairs; `tol` carries the tolerance band the
// value was, or should be, judged against; `anchor` is the provenance tag
// of the quantity so downstream harnesses can group comparable numbers.
struct ResultRow {
  std::string command;
  std::string scenario;
  std::string params;
  std::string quantity;
  int n{-1};  // window index; -1 when the value is not window-indexed
  double value{0};
  std::string tol;
  std::string anchor;
};

enum class EmitFormat { csv, jsonl };

EmitFormat parse_emit_format(const std::string& name);

// Shortest decimal string that round-trips the double.
std::string format_double(double v);

// Canonical row order: (command, scenario, quantity, n, params), so output
// bytes never depend on scheduling.
void canonical_sort(std::vector<ResultRow>& rows);

// Render in canonical order. CSV has a header line; JSONL is one object per
// line with sorted keys. Both end with a newline.
std::string render_results(std::vector<ResultRow> rows, EmitFormat fmt);

// Render to a file, or to stdout when path is empty or "-".
void write_results(std::vector<ResultRow> rows, EmitFormat fmt, const std::string& path);

}  // namespace amentropy

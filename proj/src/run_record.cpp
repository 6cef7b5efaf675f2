#include "zo/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/core.h>

namespace zo {

std::vector<long> trace_points(long N) {
  std::vector<long> points;
  if (N <= 1000) {
    points.resize(static_cast<std::size_t>(N + 1));
    for (long k = 0; k <= N; ++k) points[static_cast<std::size_t>(k)] = k;
    return points;
  }
  std::set<long> chosen{0, N};
  const int count = 100;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    chosen.insert(std::clamp(static_cast<long>(std::lround(std::pow(static_cast<double>(N), t))), 1L, N));
  }
  return {chosen.begin(), chosen.end()};
}

std::string to_string(TraceSchema schema) {
  switch (schema) {
    case TraceSchema::conditional_gradient: return "conditional_gradient";
    case TraceSchema::high_dimensional: return "high_dimensional";
    case TraceSchema::cubic: return "cubic";
  }
  return "unknown";
}

std::vector<std::string> trace_columns(TraceSchema schema) {
  std::vector<std::string> cols{"k", "calls", "lmo_calls", "fw_gap", "gp_norm", "f_gap", "x_norm"};
  switch (schema) {
    case TraceSchema::conditional_gradient: break;
    case TraceSchema::high_dimensional:
      cols.insert(cols.end(), {"grad_l1_sq", "nnz", "avg_f_gap"});
      break;
    case TraceSchema::cubic:
      cols.insert(cols.end(), {"grad_norm", "lambda_min", "model_decrease", "subsolver_iters"});
      break;
  }
  cols.push_back("is_output");
  return cols;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

void write_trace_csv(std::ostream& out, const RunRecord& record) {
  const auto cols = trace_columns(record.schema);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : record.rows) {
    out << r.k << ',' << r.calls << ',' << r.lmo_calls << ',' << format_number(r.fw_gap) << ','
        << format_number(r.gp_norm) << ',' << format_number(r.f_gap) << ',' << format_number(r.x_norm);
    switch (record.schema) {
      case TraceSchema::conditional_gradient: break;
      case TraceSchema::high_dimensional:
        out << ',' << format_number(r.grad_l1_sq) << ',' << r.nnz << ',' << format_number(r.avg_f_gap);
        break;
      case TraceSchema::cubic:
        out << ',' << format_number(r.grad_norm) << ',' << format_number(r.lambda_min) << ','
            << format_number(r.model_decrease) << ',' << r.subsolver_iters;
        break;
    }
    out << ',' << (r.is_output ? 1 : 0) << '\n';
  }
}

std::string trace_csv(const RunRecord& record) {
  std::ostringstream out;
  write_trace_csv(out, record);
  return out.str();
}

}  // namespace zo

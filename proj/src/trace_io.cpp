#include "cei/trace_io.hpp"

#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cei {

namespace {

void append_row(std::string& out, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

void append_row(std::string& out, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  const int n = vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  if (n > 0) out.append(buf, static_cast<std::size_t>(n));
}

const char* reason_name(TriggerDecision d) {
  switch (d) {
    case TriggerDecision::kReplanUpper: return "upper";
    case TriggerDecision::kReplanLower: return "lower";
    case TriggerDecision::kContinue: return "none";
  }
  return "none";
}

}  // namespace

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "time,side,s,v,a_in,a_net,max_risk,event\n";
  out.reserve(out.size() + 64 * trace.size());
  for (const TraceRecord& r : trace) {
    append_row(out, "%.2f,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", r.time, side_name(r.side),
               r.s, r.v, r.a_in, r.a_net, r.max_risk, trace_event_name(r.event));
  }
  return out;
}

std::string replans_csv(const std::vector<ReplanLogEntry>& replans) {
  std::string out =
      "time,side,reason,feasible,iterations,candidate_stage,chosen_candidate,"
      "achieved_risk,cost\n";
  for (const ReplanLogEntry& r : replans) {
    append_row(out, "%.2f,%s,%s,%d,%d,%d,%d,%.6f,%.6f\n", r.time, side_name(r.side),
               reason_name(r.reason), r.flagged_infeasible ? 0 : 1, r.diag.iterations,
               r.diag.used_candidate_stage ? 1 : 0, r.diag.chosen_candidate,
               r.diag.achieved_risk, r.diag.cost);
  }
  return out;
}

std::string belief_csv(const std::vector<BeliefRecord>& rows) {
  std::string out = "time,side,target_time,mu,sigma\n";
  out.reserve(out.size() + 40 * rows.size());
  for (const BeliefRecord& r : rows) {
    append_row(out, "%.2f,%s,%.2f,%.6f,%.6f\n", r.time, side_name(r.side),
               r.target_time, r.mu, r.sigma);
  }
  return out;
}

std::string outcome_json(const SimOutcome& o) {
  nlohmann::ordered_json j;
  j["collided"] = o.collided;
  j["end_reason"] = o.end_reason;
  j["final_time"] = o.final_time;
  j["merge_time_left"] =
      o.merge_time_left ? nlohmann::json(*o.merge_time_left) : nlohmann::json();
  j["merge_time_right"] =
      o.merge_time_right ? nlohmann::json(*o.merge_time_right) : nlohmann::json();
  j["headway_at_merge"] =
      o.headway_at_merge ? nlohmann::json(*o.headway_at_merge) : nlohmann::json();
  j["first_through_merge"] = o.first_through_merge
                                 ? nlohmann::json(side_name(*o.first_through_merge))
                                 : nlohmann::json();
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace cei

#pragma once

#include <string>
#include <vector>

#include "cei/engine.hpp"

namespace cei {

// CSV with header time,side,s,v,a_in,a_net,max_risk,event; two rows per tick,
// left before right. Formats are fixed so identical runs serialize to
// identical bytes.
std::string trace_csv(const std::vector<TraceRecord>& trace);

// CSV with header time,side,reason,feasible,iterations,candidate_stage,
// chosen_candidate,achieved_risk,cost.
std::string replans_csv(const std::vector<ReplanLogEntry>& replans);

// CSV with header time,side,target_time,mu,sigma.
std::string belief_csv(const std::vector<BeliefRecord>& rows);

// Pretty-printed JSON summary of the run outcome; absent values are null.
std::string outcome_json(const SimOutcome& outcome);

// Write content to path, throwing std::runtime_error on any I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cei

#pragma once

#include <string>

#include "threadreach/reach.hpp"

namespace threadreach {

// Deterministic DOT rendering of the ARG: nodes named by rank in sorted
// label order, labels in "thread↦location" form, edges labeled
// with the moving thread and operation text.
std::string arg_to_dot(const ReachedSet& reached, const CfaSet& cfa);

// Writes arg_to_dot output; byte-identical across repeated runs on the
// same input and configuration.
void export_arg_dot(const ReachedSet& reached, const CfaSet& cfa, const std::string& out_path);

// CFA rendering, one cluster per function.
std::string cfa_to_dot(const CfaSet& cfa);
void export_cfa_dot(const CfaSet& cfa, const std::string& out_path);

}  // namespace threadreach

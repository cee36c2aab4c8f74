#pragma once

#include <string>

#include "sdfp/approach.hpp"
#include "sdfp/certs.hpp"

namespace sdfp::io {

/// Native problem document (versioned, token-based, `#` comments).
/// L is given either as a span of symmetric matrices or as equations
/// <A_i, x> = b_i; matrices are row-major upper triangles.
Problem parse_problem_text(const std::string& text, const Tolerances& tol = {});
std::string problem_to_text(const Problem& p);

/// Minimal SDPA sparse (.dat-s) importer: single dense block, equality
/// form only. Anything else is rejected.
Problem parse_sdpa_text(const std::string& text, const Tolerances& tol = {});

/// Loads either format, auto-detected by leading token.
Problem load_problem(const std::string& path, const Tolerances& tol = {});
void save_problem(const std::string& path, const Problem& p);

std::string certificate_to_text(const Certificate& c);
Certificate parse_certificate_text(const std::string& text);
Certificate load_certificate(const std::string& path);
void save_certificate(const std::string& path, const Certificate& c);

std::string classification_report(const std::string& input_name, const Problem& p,
                                  const ClassificationResult& r);
std::string classification_json(const std::string& input_name, const Problem& p,
                                const ClassificationResult& r, const Tolerances& tol);
std::string approach_report(const std::string& input_name, const ApproachSequence& seq);
std::string approach_json(const std::string& input_name, const ApproachSequence& seq, double eps);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// 17-significant-digit decimal, reproducible across platforms.
std::string format_real(double v);

} // namespace sdfp::io

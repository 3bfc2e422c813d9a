#include "scver/spin.hpp"

#include <cstdio>
#include <filesystem>

#include "scver/json_io.hpp"
#include "scver/promela.hpp"
#include "scver/util.hpp"

namespace scver {

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_command(const std::string& cmd) {
  CommandResult res;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) throw Error(ErrorKind::Infra, "cannot spawn: " + cmd);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) {
    res.output.append(buf, n);
    if (res.output.size() > (1u << 22)) break;  // cap runaway output
  }
  int rc = pclose(pipe);
  res.exit_code = rc;
  return res;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string tail(const std::string& s, std::size_t lines = 40) {
  std::size_t pos = s.size();
  for (std::size_t n = 0; n < lines && pos > 0; ++n) {
    pos = s.find_last_of('\n', pos - 1);
    if (pos == std::string::npos) return s;
  }
  return pos == 0 ? s : s.substr(pos + 1);
}

// pan reports "errors: N" in its summary
int parse_error_count(const std::string& out) {
  auto pos = out.rfind("errors:");
  if (pos == std::string::npos) return -1;
  pos += 7;
  while (pos < out.size() && out[pos] == ' ') ++pos;
  int n = 0;
  bool any = false;
  while (pos < out.size() && out[pos] >= '0' && out[pos] <= '9') {
    n = n * 10 + (out[pos] - '0');
    ++pos;
    any = true;
  }
  return any ? n : -1;
}

bool is_violation(VerdictStatus s) {
  return s == VerdictStatus::InvariantViolation || s == VerdictStatus::AssertionViolation ||
         s == VerdictStatus::LtlViolation || s == VerdictStatus::Deadlock;
}

}  // namespace

CrosscheckReport spin_crosscheck(const ast::DesignAst& ast, const ElaboratedDesign& design,
                                 const std::string& source_text, const RunConfig& config,
                                 const std::string& property_name,
                                 const std::string& scratch_dir) {
  (void)ast;
  std::string spin = config.spin_path;
  if (spin.empty()) {
    const char* env = std::getenv("SCVER_SPIN");
    if (env) spin = env;
  }
  if (spin.empty()) {
    throw Error(ErrorKind::Infra, "SPIN not configured: pass --spin or set SCVER_SPIN");
  }

  const ResolvedProperty* property = design.find_property(property_name);
  if (!property) fail_semantic("unknown property '" + property_name + "'");

  CrosscheckReport report;
  report.property = property_name;

  // internal side: the property alone, deadlock excluded so both engines
  // answer the same question
  CheckOptions opts = config.check_options();
  opts.check_deadlock = false;
  Verdict internal = property->is_ltl
                         ? check_ltl(design, opts, property->formula, property_name)
                         : check_safety(design, opts, {*property});
  report.internal_status = internal.status;
  report.internal_message = internal.message;

  // external side
  std::error_code ec;
  std::filesystem::create_directories(scratch_dir, ec);
  if (ec) throw Error(ErrorKind::Infra, "cannot create scratch dir '" + scratch_dir + "'");
  std::string model = emit_promela(design, config.limits(), config.env, sha256_hex(source_text));
  std::string pml = scratch_dir + "/model.pml";
  write_file(pml, model);

  auto probe = run_command(shell_quote(spin) + " -V");
  if (probe.exit_code != 0) {
    throw Error(ErrorKind::Infra, "SPIN executable '" + spin + "' is not runnable");
  }
  std::string cd = "cd " + shell_quote(scratch_dir) + " && ";
  auto gen = run_command(cd + shell_quote(spin) + " -a model.pml");
  if (!std::filesystem::exists(scratch_dir + "/pan.c")) {
    throw Error(ErrorKind::Infra, "spin -a produced no verifier source:\n" + tail(gen.output));
  }
  auto cc = run_command(cd + "cc -O2 -DNOREDUCE -o pan pan.c");
  if (cc.exit_code != 0 || !std::filesystem::exists(scratch_dir + "/pan")) {
    throw Error(ErrorKind::Infra, "verifier compilation failed:\n" + tail(cc.output));
  }
  auto pan = run_command(cd + "./pan -a -m1000000 -N " + shell_quote(mangle_segment(property_name)));
  int errors = parse_error_count(pan.output);
  if (errors < 0) {
    throw Error(ErrorKind::Infra, "could not parse verifier output:\n" + tail(pan.output));
  }
  report.spin_verdict = errors == 0 ? "pass" : "violation";
  report.spin_output = tail(pan.output);

  if (internal.status == VerdictStatus::Pass || is_violation(internal.status)) {
    report.comparable = true;
    report.agree = (internal.status == VerdictStatus::Pass) == (errors == 0);
  }
  return report;
}

}  // namespace scver

#pragma once
// Shared utilities: error types, resource guards, deterministic work meter,
// and small formatting helpers used across the solver.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ozsg {

// ---------------------------------------------------------------------------
// Errors

// Malformed game file. `line` is 1-based; 0 means "not tied to a line".
struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(std::string msg, int line_ = 0)
      : std::runtime_error(std::move(msg)), line(line_) {}
};

// Wall-clock budget exhausted.
struct OutOfTime : std::runtime_error {
  OutOfTime() : std::runtime_error("time budget exhausted") {}
};

// Memory cap exceeded (logical accounting or RSS probe).
struct OutOfMemory : std::runtime_error {
  OutOfMemory() : std::runtime_error("memory cap exceeded") {}
};

// Internal invariant violation; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

// ---------------------------------------------------------------------------
// Resource guard: wall-clock budget + memory cap.
//
// The guard is polled at coarse-grained points (once per LP solve, per
// expansion round, per CFR iteration). Memory is checked against the
// process RSS so the cap reflects real usage.
class ResourceGuard {
 public:
  ResourceGuard();
  void set_budget_seconds(double s) { budget_seconds_ = s; }
  void set_memory_cap_mib(double m) { memory_cap_mib_ = m; }
  double elapsed_seconds() const;
  double rss_mib() const;
  bool time_exceeded() const;
  bool memory_exceeded() const;
  // Throws OutOfTime / OutOfMemory when a limit is exceeded.
  void check() const;

 private:
  double budget_seconds_ = -1.0;  // <0: unlimited
  double memory_cap_mib_ = -1.0;  // <0: unlimited
  double start_;
};

double wall_clock_seconds();

// ---------------------------------------------------------------------------
// Deterministic work meter.
//
// Progress CSVs must be byte-identical across repeated seeded runs, so the
// `cumul_time` column is derived from a deterministic operation counter
// scaled to seconds-like units rather than from the wall clock. Budget
// enforcement always uses real time (ResourceGuard).
class WorkMeter {
 public:
  void add(std::uint64_t units) { units_ += units; }
  std::uint64_t units() const { return units_; }
  // 1 unit ~ 20ns of nominal work; keeps magnitudes comparable to seconds.
  double virtual_seconds() const { return 2e-8 * static_cast<double>(units_); }
  void reset() { units_ = 0; }

 private:
  std::uint64_t units_ = 0;
};

// ---------------------------------------------------------------------------
// Formatting helpers

// Fixed-format float for CSV output: shortest representation that
// round-trips, with deterministic formatting across platforms.
std::string csv_double(double v);

std::string format_double(double v, int precision);

// Splits on whitespace.
std::vector<std::string> split_ws(const std::string& s);

bool parse_double(const std::string& tok, double& out);
bool parse_int(const std::string& tok, long long& out);

// FNV-1a over bytes; used for model fingerprints in checkpoints.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);

}  // namespace ozsg

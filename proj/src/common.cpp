#include "ozsg/common.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ozsg {

double wall_clock_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

ResourceGuard::ResourceGuard() : start_(wall_clock_seconds()) {}

double ResourceGuard::elapsed_seconds() const { return wall_clock_seconds() - start_; }

double ResourceGuard::rss_mib() const {
  std::ifstream f("/proc/self/statm");
  if (!f) return 0.0;
  long long pages = 0, resident = 0;
  f >> pages >> resident;
  return static_cast<double>(resident) * 4096.0 / (1024.0 * 1024.0);
}

bool ResourceGuard::time_exceeded() const {
  return budget_seconds_ >= 0.0 && elapsed_seconds() > budget_seconds_;
}

bool ResourceGuard::memory_exceeded() const {
  return memory_cap_mib_ >= 0.0 && rss_mib() > memory_cap_mib_;
}

void ResourceGuard::check() const {
  if (time_exceeded()) throw OutOfTime();
  if (memory_exceeded()) throw OutOfMemory();
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  // %.17g round-trips but is noisy; try increasing precision until the
  // value round-trips, which yields stable short output.
  for (int prec = 6; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& tok, double& out) {
  const char* b = tok.c_str();
  char* end = nullptr;
  out = std::strtod(b, &end);
  return end == b + tok.size() && !tok.empty();
}

bool parse_int(const std::string& tok, long long& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  return fnv1a(s.data(), s.size(), seed);
}

}  // namespace ozsg

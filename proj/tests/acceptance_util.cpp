#include "acceptance_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

namespace acceptance {

void Reporter::run(int number, const std::string& label, const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string failure;
  try {
    body();
  } catch (const CheckFailure& f) {
    failure = f.message;
  } catch (const std::exception& e) {
    failure = std::string("unexpected exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (failure.empty()) {
    std::printf("[PASS] criterion %d: %s (%.1f s)\n", number, label.c_str(), seconds);
  } else {
    ++failures_;
    std::printf("[FAIL] criterion %d: %s (%.1f s) -- %s\n", number, label.c_str(), seconds,
                failure.c_str());
  }
  std::fflush(stdout);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure{message};
}

void require_close(double actual, double expected, double tolerance, const std::string& message) {
  if (!(std::abs(actual - expected) <= tolerance)) {
    std::ostringstream out;
    out.precision(15);
    out << message << " (got " << actual << ", expected " << expected << " +- " << tolerance
        << ")";
    throw CheckFailure{out.str()};
  }
}

}  // namespace acceptance

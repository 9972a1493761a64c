#include "shellspec/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "shellspec/error.hpp"

namespace shellspec {

namespace {

int initial_budget() {
  if (const char* env = std::getenv("SHELLSPEC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

std::atomic<int>& budget() {
  static std::atomic<int> value{initial_budget()};
  return value;
}

}  // namespace

int thread_budget() { return budget().load(std::memory_order_relaxed); }

void set_thread_budget(int threads) {
  if (threads < 1) throw Error(ErrorKind::Usage, "thread budget must be positive");
  budget().store(threads, std::memory_order_relaxed);
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::SearchExhausted: return "search exhausted";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Convexity: return "convexity error";
    case ErrorKind::Meshing: return "meshing error";
    case ErrorKind::DegenerateProblem: return "degenerate problem";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::FlowDegenerate: return "flow degenerate";
    case ErrorKind::Remesh: return "remesh error";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace shellspec

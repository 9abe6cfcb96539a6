#include "hjm/parallel.hpp"

#include <atomic>

namespace hjm {
namespace {

std::atomic<int>& jobs_setting() {
  static std::atomic<int> jobs{std::max(1, static_cast<int>(std::thread::hardware_concurrency()))};
  return jobs;
}

}  // namespace

int default_jobs() { return jobs_setting().load(); }

void set_default_jobs(int jobs) { jobs_setting().store(std::max(1, jobs)); }

}  // namespace hjm

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "curlgap/parallel.hpp"

using namespace curlgap;

namespace {

struct ThreadEnv {
  explicit ThreadEnv(const char* value) {
    if (const char* old = std::getenv("CURLGAP_THREADS")) saved = old;
    if (value) {
      setenv("CURLGAP_THREADS", value, 1);
    } else {
      unsetenv("CURLGAP_THREADS");
    }
  }
  ~ThreadEnv() {
    if (saved.empty()) {
      unsetenv("CURLGAP_THREADS");
    } else {
      setenv("CURLGAP_THREADS", saved.c_str(), 1);
    }
  }
  std::string saved;
};

}  // namespace

TEST(Parallel, VisitsEveryIndexOnce) {
  for (const char* threads : {"1", "4"}) {
    ThreadEnv env(threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Parallel, RethrowsFirstExceptionByIndex) {
  ThreadEnv env("4");
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}

TEST(Parallel, ThreadCountFromEnvironment) {
  {
    ThreadEnv env("3");
    EXPECT_EQ(max_threads(), 3u);
  }
  {
    ThreadEnv env("0");
    EXPECT_EQ(max_threads(), std::max(1u, std::thread::hardware_concurrency()));
  }
  {
    ThreadEnv env("many");
    EXPECT_GE(max_threads(), 1u);
  }
  {
    ThreadEnv env(nullptr);
    EXPECT_EQ(max_threads(), std::max(1u, std::thread::hardware_concurrency()));
  }
}

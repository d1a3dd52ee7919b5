//------------------------------------------------------------------------------
//
//   Copyright 2026 The popsim Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace popsim {

// Runs body(i) for i in [0, count). Tasks are claimed dynamically, so any
// result that must be reproducible has to depend on i alone (derive seeds
// from i, write into slot i).
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body &&body)
{
  unsigned const workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      body(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr       failure;
  std::mutex               failure_lock;

  auto worker = [&] {
    for (;;)
    {
      std::size_t const i = next.fetch_add(1);
      if (i >= count)
      {
        return;
      }
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure)
        {
          failure = std::current_exception();
        }
        next = count;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
  {
    pool.emplace_back(worker);
  }
  pool.clear();

  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace popsim

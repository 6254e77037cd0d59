#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

namespace enrp {

/// Number of worker threads to use when the caller passes 0.
int default_workers();

/// Runs fn(0..count-1) on up to `workers` threads. Tasks must not share
/// mutable state. If any task throws, the exception from the lowest failing
/// index is rethrown after all workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Deterministic generator keyed by an arbitrary tuple of integers.
std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> key);

}  // namespace enrp

// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();

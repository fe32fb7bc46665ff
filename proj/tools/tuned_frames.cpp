//------------------------------------------------------------------------------
// Copyright 2026 The autotune authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//------------------------------------------------------------------------------
// Renders raytrace frames in a loop with the builtin tuning parameters; each
// frame is one tuning iteration. Prints the configuration of every frame.
#include <autotune/autotune.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace autotune;
    const int frames = argc > 1 ? std::atoi(argv[1]) : 60;
    const auto spec = make_workload_spec("raytrace", 256);
    const auto params = builtin_parameters(16, 12);

    Tuner tuner(params, 2024);
    ThreadPool pool(hardware_cores());
    for (int f = 0; f < frames; ++f) {
        tuned_invoke(pool, tuner, [&](ThreadPool& p, std::int64_t grain) {
            run_workload_checked(spec, p, grain);
        });
        const auto& m = tuner.trace().measurements.back();
        std::printf("frame %3d  %-8s threads=%2lld grain=2^%-2lld  %.4f s\n", f + 1,
                    to_string(tuner.mode()), static_cast<long long>(m.config[0]),
                    static_cast<long long>(m.config[1]), m.duration);
    }
    if (auto a = tuner.amortization())
        std::printf("tuning paid for itself at iteration %zu\n", *a);
    else
        std::printf("not amortized within %d frames\n", frames);
}

// Benchmark: parallel experiment loop vs the serial reference, checking
// that both produce byte-identical raw output.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "hetsched/harness.hpp"

using namespace hetsched;

int main(int argc, char** argv) {
    ExperimentConfig config;
    config.instances = 24;
    if (argc > 1) {
        config.instances = std::atoi(argv[1]);
        if (config.instances < 1) {
            std::cerr << "usage: hetsched_bench [instances] [jobs]\n";
            return 2;
        }
    }
    int jobs = 0;
    if (argc > 2) {
        jobs = std::atoi(argv[2]);
    }

    std::cout << "instances per cell: " << config.instances << "\n";
    std::cout << "cells: "
              << config.models.size() *
                     (1 + config.state_indices.size() * config.alphas.size())
              << "\n";

    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport serial = run_experiment_serial(config);
    const auto t1 = std::chrono::steady_clock::now();
    ExperimentReport parallel = run_experiment(config, jobs);
    const auto t2 = std::chrono::steady_clock::now();

    const double serial_s = std::chrono::duration<double>(t1 - t0).count();
    const double parallel_s = std::chrono::duration<double>(t2 - t1).count();
    std::cout << "serial reference: " << serial_s << " s\n";
    std::cout << "parallel:         " << parallel_s << " s\n";
    std::cout << "speedup:          " << serial_s / parallel_s << "x\n";

    if (raw_csv_string(serial) != raw_csv_string(parallel)) {
        std::cerr << "FAIL: parallel raw output differs from serial reference\n";
        return 1;
    }
    std::cout << "raw outputs identical\n";
    return 0;
}

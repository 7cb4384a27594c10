#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "ppadkit/brouwer.hpp"
#include "ppadkit/brouwer2circuit.hpp"
#include "ppadkit/endofline.hpp"
#include "ppadkit/games.hpp"

namespace ppadkit::pipeline {

struct Params {
    Rational eps{1, 4096};
    Rational eps_prime{0, 1}; // zero means the 4*sqrt(eps) default
    Rational delta{1, 44};
    Rational corner_tau{1, 24};

    Rational effective_eps_prime() const {
        if (eps_prime.num != 0) return eps_prime;
        // 4*sqrt(eps) keeps 4/eps' integral whenever 1/sqrt(eps) is
        std::int64_t k2 = eps.den / eps.num;
        auto k = static_cast<std::int64_t>(std::llround(std::sqrt(double(k2))));
        return Rational(4, k);
    }
};

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t hash_file(const std::filesystem::path& p);

struct Bundle {
    std::filesystem::path dir;
    Params params;
    std::filesystem::path eol_file, circuit_file, symbols_file, fanout2_file, game_file,
        manifest_file;
};

// Builds every stage artifact under `dir` and writes a manifest with
// content hashes. Deterministic: identical inputs give identical bytes.
Bundle run_pipeline(const eol::EndOfLineInstance& inst, const Params& params,
                    const std::filesystem::path& dir);

// CSV over a 2-D slice of the displacement field: columns
// x_i, x_j, g_1..g_dim.
void slice_plot(std::ostream& os, const brouwer::BrouwerInstance& inst, int axis_i, int axis_j,
                const brouwer::Point& base, int resolution);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& content);

} // namespace ppadkit::pipeline

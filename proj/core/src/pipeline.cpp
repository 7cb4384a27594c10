#include "ppadkit/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ppadkit/fanout2.hpp"

namespace ppadkit::pipeline {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
}

std::uint64_t hash_file(const std::filesystem::path& p) { return fnv1a64(read_text_file(p)); }

Bundle run_pipeline(const eol::EndOfLineInstance& inst, const Params& params,
                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    Bundle b;
    b.dir = dir;
    b.params = params;
    b.eol_file = dir / "stage0_eol.txt";
    b.circuit_file = dir / "stage1_circuit.gc";
    b.symbols_file = dir / "stage1_circuit.sym";
    b.fanout2_file = dir / "stage2_fanout2.gc";
    b.game_file = dir / "stage3_game.pg";
    b.manifest_file = dir / "manifest.json";

    {
        std::ostringstream ss;
        eol::write_instance(ss, inst);
        write_text_file(b.eol_file, ss.str());
    }
    b2c::CompiledBundle compiled =
        b2c::compile(inst, params.eps, params.delta, params.corner_tau);
    {
        std::ostringstream ss;
        gc::serialize(ss, compiled.circuit);
        write_text_file(b.circuit_file, ss.str());
    }
    {
        std::ostringstream ss;
        b2c::write_symbols(ss, compiled);
        write_text_file(b.symbols_file, ss.str());
    }
    gc::GeneralizedCircuit bounded =
        fanout2::transform_fanout2(compiled.circuit, params.effective_eps_prime());
    {
        std::ostringstream ss;
        gc::serialize(ss, bounded);
        write_text_file(b.fanout2_file, ss.str());
    }
    double eps_game = params.eps.to_double() / 2.0;
    games::CompiledGame cg = games::compile_circuit_to_game(bounded, eps_game);
    {
        std::ostringstream ss;
        games::write_game(ss, cg.game);
        write_text_file(b.game_file, ss.str());
    }

    nlohmann::json manifest;
    manifest["parameters"] = {{"n", inst.n},
                              {"eps", params.eps.str()},
                              {"eps_prime", params.effective_eps_prime().str()},
                              {"delta", params.delta.str()},
                              {"corner_tau", params.corner_tau.str()},
                              {"eps_game", eps_game}};
    char buf[32];
    auto put = [&](const char* key, const std::filesystem::path& p) {
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(hash_file(p)));
        manifest["files"][key] = {{"path", p.filename().string()}, {"fnv1a64", buf}};
    };
    put("eol", b.eol_file);
    put("circuit", b.circuit_file);
    put("symbols", b.symbols_file);
    put("fanout2", b.fanout2_file);
    put("game", b.game_file);
    write_text_file(b.manifest_file, manifest.dump(2) + "\n");
    return b;
}

void slice_plot(std::ostream& os, const brouwer::BrouwerInstance& inst, int axis_i, int axis_j,
                const brouwer::Point& base, int resolution) {
    if (axis_i < 0 || axis_j < 0 || axis_i >= inst.dim || axis_j >= inst.dim ||
        axis_i == axis_j)
        throw std::invalid_argument("bad slice axes");
    if (static_cast<int>(base.size()) != inst.dim)
        throw std::invalid_argument("base point dimension mismatch");
    os << "x_i,x_j";
    for (int d = 1; d <= inst.dim; ++d) os << ",g_" << d;
    os << "\n";
    char buf[64];
    brouwer::Point pt = base;
    std::vector<double> g(inst.dim);
    for (int a = 0; a <= resolution; ++a) {
        for (int bb = 0; bb <= resolution; ++bb) {
            pt[axis_i] = static_cast<double>(a) / resolution;
            pt[axis_j] = static_cast<double>(bb) / resolution;
            brouwer::displacement(inst, pt.data(), g.data());
            std::snprintf(buf, sizeof buf, "%.17g", pt[axis_i]);
            os << buf;
            std::snprintf(buf, sizeof buf, "%.17g", pt[axis_j]);
            os << ',' << buf;
            for (double v : g) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                os << ',' << buf;
            }
            os << "\n";
        }
    }
}

} // namespace ppadkit::pipeline

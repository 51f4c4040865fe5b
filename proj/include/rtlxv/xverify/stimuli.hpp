#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtlxv/ir/ir.hpp"
#include "rtlxv/sim/trace.hpp"

namespace rtlxv::xverify {

/// splitmix64 step; used to expand a 64-bit seed into generator state.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** with state seeded by four splitmix64 outputs.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);
    Xoshiro256(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3);

    std::uint64_t next();
    /// Uniform value in [0, 2^width) taken from the high bits of next().
    std::uint64_t draw(int width);

private:
    std::uint64_t s_[4];
};

struct StimulusPlan {
    std::uint64_t num_vectors = 1000;
    std::uint64_t seed = 42;
    std::uint64_t reset_cycles = 2;
};

/// Throws std::invalid_argument unless num_vectors >= 1 and reset_cycles < num_vectors.
void validate(const StimulusPlan& plan);

enum class InputRole { data, clock, reset_high, reset_low };

struct StimulusPort {
    std::string name;
    int width = 1;
    InputRole role = InputRole::data;
};

/// Input ports of `d` with their stimulus roles, in port order.
[[nodiscard]] std::vector<StimulusPort> stimulus_ports(const ir::Design& d);

/// Input ports taken from a manifest; clocks are named explicitly and resets follow the naming convention.
[[nodiscard]] std::vector<StimulusPort> stimulus_ports(const std::vector<sim::PortInfo>& manifest,
                                                        const std::vector<std::string>& clocks);

/// One map per vector: data inputs drawn in port order, resets asserted for the first reset_cycles, clocks omitted.
[[nodiscard]] std::vector<sim::ValueMap> gen_stimuli(const std::vector<StimulusPort>& ports, const StimulusPlan& plan);
[[nodiscard]] std::vector<sim::ValueMap> gen_stimuli(const ir::Design& d, const StimulusPlan& plan);

}  // namespace rtlxv::xverify

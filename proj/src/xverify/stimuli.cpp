#include "rtlxv/xverify/stimuli.hpp"

#include <stdexcept>

namespace rtlxv::xverify {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
}

Xoshiro256::Xoshiro256(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) : s_{s0, s1, s2, s3} {}

std::uint64_t Xoshiro256::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t Xoshiro256::draw(int width) {
    std::uint64_t v = next();
    return width >= 64 ? v : v >> (64 - width);
}

void validate(const StimulusPlan& plan) {
    if (plan.num_vectors < 1) throw std::invalid_argument("stimulus plan needs at least one vector");
    if (plan.reset_cycles >= plan.num_vectors) {
        throw std::invalid_argument("reset cycles must be fewer than the number of vectors");
    }
}

std::vector<StimulusPort> stimulus_ports(const ir::Design& d) {
    std::vector<StimulusPort> ports;
    for (ir::NetId id : d.inputs()) {
        const ir::Net& n = d.nets[static_cast<std::size_t>(id)];
        StimulusPort p{n.name, n.width, InputRole::data};
        if (d.is_clock(id)) {
            p.role = InputRole::clock;
        } else if (const auto* r = d.reset_for(id)) {
            p.role = r->active_high ? InputRole::reset_high : InputRole::reset_low;
        }
        ports.push_back(std::move(p));
    }
    return ports;
}

std::vector<StimulusPort> stimulus_ports(const std::vector<sim::PortInfo>& manifest, const std::vector<std::string>& clocks) {
    std::vector<StimulusPort> ports;
    for (const auto& m : manifest) {
        if (m.direction != sim::Direction::input) continue;
        StimulusPort p{m.name, m.width, InputRole::data};
        bool is_clock = false;
        for (const auto& c : clocks) is_clock = is_clock || c == m.name;
        if (is_clock) {
            p.role = InputRole::clock;
        } else if (auto pol = ir::reset_name_polarity(m.name); pol && m.width == 1) {
            p.role = *pol ? InputRole::reset_high : InputRole::reset_low;
        }
        ports.push_back(std::move(p));
    }
    return ports;
}

std::vector<sim::ValueMap> gen_stimuli(const std::vector<StimulusPort>& ports, const StimulusPlan& plan) {
    validate(plan);
    Xoshiro256 rng(plan.seed);
    std::vector<sim::ValueMap> out;
    out.reserve(plan.num_vectors);
    for (std::uint64_t i = 0; i < plan.num_vectors; ++i) {
        sim::ValueMap v;
        const bool in_reset = i < plan.reset_cycles;
        for (const auto& p : ports) {
            switch (p.role) {
                case InputRole::clock:
                    break;
                case InputRole::reset_high:
                    v[p.name] = in_reset ? 1 : 0;
                    break;
                case InputRole::reset_low:
                    v[p.name] = in_reset ? 0 : 1;
                    break;
                case InputRole::data:
                    v[p.name] = rng.draw(p.width);
                    break;
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<sim::ValueMap> gen_stimuli(const ir::Design& d, const StimulusPlan& plan) {
    return gen_stimuli(stimulus_ports(d), plan);
}

}  // namespace rtlxv::xverify

#include "rtlxv/xverify/shim.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#ifndef RTLXV_DEFAULT_SHIM
#define RTLXV_DEFAULT_SHIM "ref_shim.py"
#endif

extern char** environ;

namespace rtlxv::xverify {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

bool write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

class TempSource {
public:
    explicit TempSource(const std::string& text) {
        auto dir = std::filesystem::temp_directory_path();
        std::string tmpl = (dir / "rtlxv_ref_XXXXXX.py").string();
        int fd = ::mkstemps(tmpl.data(), 3);
        if (fd < 0) throw std::runtime_error("cannot create temporary file: " + std::string(std::strerror(errno)));
        ::close(fd);
        path_ = tmpl;
        std::ofstream out(path_, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + path_);
    }
    ~TempSource() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempSource(const TempSource&) = delete;
    TempSource& operator=(const TempSource&) = delete;
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

const char* direction_name(sim::Direction d) { return d == sim::Direction::input ? "input" : "output"; }

}  // namespace

ShimConfig ShimConfig::from_environment() {
    ShimConfig cfg;
    if (const char* env = std::getenv("RTLXV_SHIM"); env && *env) {
        std::istringstream ss(env);
        for (std::string w; ss >> w;) cfg.command.push_back(w);
    }
    if (cfg.command.empty()) cfg.command = {"python3", RTLXV_DEFAULT_SHIM};
    return cfg;
}

ShimProcess::ShimProcess(const std::vector<std::string>& command) {
    if (command.empty()) throw std::runtime_error("empty shim command");
    ignore_sigpipe();
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw std::runtime_error("pipe failed");
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw std::runtime_error("pipe failed");
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

    std::vector<char*> argv;
    for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_t pid = -1;
    int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw std::runtime_error("cannot start shim '" + command[0] + "': " + std::strerror(rc));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

ShimProcess::~ShimProcess() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
    }
}

void ShimProcess::close() {
    if (to_child_ >= 0) {
        write_all(to_child_, "{\"cmd\":\"quit\"}\n");
        ::close(to_child_);
        to_child_ = -1;
    }
    if (pid_ > 0) {
        for (int i = 0; i < 50; ++i) {
            int status = 0;
            pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_ || (r < 0 && errno != EINTR)) {
                pid_ = -1;
                return;
            }
            ::usleep(2000);
        }
    }
}

ShimProcess::Status ShimProcess::request(const json& frame, Clock::time_point deadline, json& reply) {
    if (to_child_ < 0 || !write_all(to_child_, frame.dump() + "\n")) return Status::closed;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            reply = json::parse(line, nullptr, false);
            return Status::ok;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (remaining <= 0) return Status::timeout;
        pollfd p{from_child_, POLLIN, 0};
        int rc = ::poll(&p, 1, static_cast<int>(remaining));
        if (rc < 0) {
            if (errno == EINTR) continue;
            return Status::closed;
        }
        if (rc == 0) return Status::timeout;
        char chunk[8192];
        ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            return Status::closed;
        }
        if (n == 0) return Status::closed;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

ReferenceOutcome run_reference(const std::string& python_source, const std::vector<sim::PortInfo>& manifest,
                               const std::vector<sim::ValueMap>& stimuli, const ShimConfig& cfg) {
    const auto deadline = Clock::now() + cfg.timeout;
    TempSource source(python_source);
    std::unique_ptr<ShimProcess> shim;
    try {
        shim = std::make_unique<ShimProcess>(cfg.command);
    } catch (const std::exception& e) {
        return FailureTier{RuntimeError{e.what(), std::nullopt}};
    }

    json ports = json::array();
    for (const auto& p : manifest) {
        ports.push_back({{"name", p.name}, {"direction", direction_name(p.direction)}, {"width", p.width}});
    }
    json reply;
    auto status = shim->request({{"cmd", "load"}, {"source_path", source.path()}, {"ports", ports}}, deadline, reply);
    if (status == ShimProcess::Status::timeout) return FailureTier{RuntimeError{"timeout", std::nullopt}};
    if (status == ShimProcess::Status::closed) return FailureTier{RuntimeError{"reference runner exited", std::nullopt}};
    if (!reply.is_object()) return FailureTier{RuntimeError{"malformed reply from reference runner", std::nullopt}};
    if (reply.value("ok", false) != true) {
        if (reply.value("stage", "") == "compile") return FailureTier{CompileError{reply.value("detail", "")}};
        std::string detail = reply.contains("error") ? reply["error"].value("detail", "") : reply.dump();
        return FailureTier{RuntimeError{"load failed: " + detail, std::nullopt}};
    }

    sim::WaveTrace trace;
    trace.ports = manifest;
    trace.cycles.reserve(stimuli.size());
    for (std::uint64_t i = 0; i < stimuli.size(); ++i) {
        sim::CycleRecord rec;
        json inputs = json::object();
        for (const auto& p : manifest) {
            if (p.direction != sim::Direction::input) continue;
            auto f = stimuli[i].find(p.name);
            std::uint64_t v = f == stimuli[i].end() ? 1 : f->second;
            rec.inputs[p.name] = v;
            inputs[p.name] = v;
        }
        status = shim->request({{"cmd", "eval"}, {"inputs", inputs}}, deadline, reply);
        if (status == ShimProcess::Status::timeout) return FailureTier{RuntimeError{"timeout", i}};
        if (status == ShimProcess::Status::closed) return FailureTier{RuntimeError{"reference runner exited", i}};
        if (!reply.is_object()) return FailureTier{RuntimeError{"malformed reply from reference runner", i}};
        if (auto e = reply.find("error"); e != reply.end()) {
            const std::string stage = e->is_object() ? e->value("stage", "") : "";
            const std::string detail = e->is_object() ? e->value("detail", "") : e->dump();
            std::uint64_t cycle = i;
            if (e->is_object() && e->contains("cycle") && (*e)["cycle"].is_number_unsigned()) {
                cycle = (*e)["cycle"].get<std::uint64_t>();
            }
            if (stage == "port") return FailureTier{PortMismatch{detail + " (cycle " + std::to_string(cycle) + ")"}};
            return FailureTier{RuntimeError{detail, cycle}};
        }
        auto o = reply.find("outputs");
        if (o == reply.end() || !o->is_object()) {
            return FailureTier{RuntimeError{"reply without outputs", i}};
        }
        std::size_t expected = 0;
        for (const auto& p : manifest) {
            if (p.direction != sim::Direction::output) continue;
            ++expected;
            auto v = o->find(p.name);
            if (v == o->end()) return FailureTier{PortMismatch{"missing output " + p.name}};
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
                return FailureTier{PortMismatch{"output " + p.name + " is not a non-negative integer"}};
            }
            std::uint64_t value = v->get<std::uint64_t>();
            if (p.width < 64 && (value >> p.width) != 0) {
                return FailureTier{PortMismatch{"output " + p.name + " exceeds " + std::to_string(p.width) + " bits"}};
            }
            rec.outputs[p.name] = value;
        }
        if (o->size() != expected) return FailureTier{PortMismatch{"unexpected extra outputs"}};
        trace.cycles.push_back(std::move(rec));
    }
    shim->close();
    return trace;
}

ReferenceOutcome run_reference(const pyref::RefSource& src, const std::vector<sim::ValueMap>& stimuli,
                               const ShimConfig& cfg) {
    return run_reference(src.text, src.port_manifest, stimuli, cfg);
}

}  // namespace rtlxv::xverify

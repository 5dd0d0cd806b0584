#include "hibo/objective_io.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

extern char** environ;

namespace hibo {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe() {
        if (::pipe(fds) != 0) {
            throw std::runtime_error("evaluate_external: pipe() failed");
        }
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
};

void ignore_sigpipe_once() {
    // A worker that exits before reading its request must not kill us.
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

/// Reads until '\n' or EOF, honoring the deadline. Returns false on
/// timeout.
bool read_line_with_deadline(int fd, double timeout_seconds,
                             std::string& line) {
    auto deadline = Clock::now() +
                    std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(timeout_seconds));
    char buf[4096];
    while (true) {
        if (timeout_seconds > 0.0) {
            auto left = std::chrono::duration<double>(deadline - Clock::now())
                            .count();
            if (left <= 0.0) return false;
            struct pollfd pfd {
                fd, POLLIN, 0
            };
            int rc = ::poll(&pfd, 1, static_cast<int>(left * 1000.0) + 1);
            if (rc == 0) return false;
            if (rc < 0) {
                if (errno == EINTR) continue;
                return true;  // treat as EOF; caller sees malformed reply
            }
        }
        ssize_t n = ::read(fd, buf, sizeof(buf));
        if (n < 0) {
            if (errno == EINTR) continue;
            return true;
        }
        if (n == 0) return true;  // EOF
        line.append(buf, static_cast<std::size_t>(n));
        auto pos = line.find('\n');
        if (pos != std::string::npos) {
            line.resize(pos);
            return true;
        }
    }
}

}  // namespace

Observation evaluate_external(const ExternalObjectiveSpec& spec, int iteration,
                              const std::vector<double>& point_raw) {
    if (spec.command.empty()) {
        throw std::runtime_error("evaluate_external: empty command");
    }
    if (point_raw.size() != spec.space.dim()) {
        throw std::invalid_argument(
            "evaluate_external: point/manifest dimensionality mismatch");
    }
    ignore_sigpipe_once();

    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < point_raw.size(); ++i) {
        params[spec.space.dimension(i).name] = point_raw[i];
    }
    std::string request =
        nlohmann::json{{"iteration", iteration}, {"params", params}}.dump();
    request.push_back('\n');

    Pipe to_child;
    Pipe from_child;

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child.fds[0], 0);
    posix_spawn_file_actions_adddup2(&actions, from_child.fds[1], 1);
    posix_spawn_file_actions_addclose(&actions, to_child.fds[1]);
    posix_spawn_file_actions_addclose(&actions, from_child.fds[0]);

    std::vector<char*> argv;
    argv.reserve(spec.command.size() + 1);
    for (const auto& arg : spec.command) {
        argv.push_back(const_cast<char*>(arg.c_str()));
    }
    argv.push_back(nullptr);

    pid_t pid = -1;
    int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(),
                            environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
        throw std::runtime_error("evaluate_external: cannot spawn '" +
                                 spec.command[0] + "': " + std::strerror(rc));
    }
    to_child.close_read();
    from_child.close_write();

    auto started = Clock::now();
    Observation obs;
    obs.iteration = iteration;
    obs.failed = true;
    obs.value = spec.failure_penalty_value;

    std::size_t written = 0;
    while (written < request.size()) {
        ssize_t n = ::write(to_child.fds[1], request.data() + written,
                            request.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;  // broken pipe: child will be reaped below
        }
        written += static_cast<std::size_t>(n);
    }
    to_child.close_write();

    std::string line;
    bool in_time =
        read_line_with_deadline(from_child.fds[0], spec.timeout_seconds, line);
    double wall = std::chrono::duration<double>(Clock::now() - started).count();

    if (!in_time) {
        ::kill(pid, SIGKILL);
        int status = 0;
        ::waitpid(pid, &status, 0);
        obs.eval_seconds = wall;
        return obs;
    }

    int status = 0;
    ::waitpid(pid, &status, 0);
    obs.eval_seconds = wall;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        return obs;
    }

    try {
        nlohmann::json reply = nlohmann::json::parse(line);
        double objective = reply.at("objective").get<double>();
        bool failed = reply.at("failed").get<bool>();
        double eval_seconds = reply.at("eval_seconds").get<double>();
        obs.failed = failed;
        obs.value = failed ? spec.failure_penalty_value : objective;
        obs.eval_seconds = eval_seconds;
    } catch (const nlohmann::json::exception&) {
        // malformed reply: keep the failed/penalty observation
        obs.eval_seconds = wall;
    }
    return obs;
}

double s_pitr(const SPitrInputs& inputs) {
    if (inputs.total_tuning_seconds < 0.0 || inputs.failed_count < 0 ||
        inputs.penalty_seconds_per_failure < 0.0) {
        throw std::invalid_argument("s_pitr: negative inputs");
    }
    double denom = inputs.total_tuning_seconds +
                   static_cast<double>(inputs.failed_count) *
                       inputs.penalty_seconds_per_failure;
    if (denom <= 0.0) {
        throw std::invalid_argument("s_pitr: denominator must be positive");
    }
    return inputs.performance_improvement / denom;
}

}  // namespace hibo

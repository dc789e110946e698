#include "queryrec/external_generator.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "queryrec/errors.hpp"

namespace queryrec {

namespace {

std::string excerpt(const std::string& line) {
    constexpr std::size_t kMax = 120;
    if (line.size() <= kMax) {
        return line;
    }
    return line.substr(0, kMax) + "...";
}

} // namespace

ExternalGenerator::ExternalGenerator(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    if (command_.empty()) {
        throw UsageError("external generator command is empty");
    }
}

ExternalGenerator::~ExternalGenerator() {
    shutdown();
}

void ExternalGenerator::ensure_started() {
    if (pid_ > 0) {
        return;
    }
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw TransportError("pipe() failed: " + std::string(std::strerror(errno)));
    }
    pid_t pid = fork();
    if (pid < 0) {
        throw TransportError("fork() failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    buffer_.clear();
}

void ExternalGenerator::shutdown() {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        // Closing stdin asks the child to exit; give it a moment, then kill.
        for (int i = 0; i < 50; ++i) {
            pid_t done = waitpid(pid_, &status, WNOHANG);
            if (done == pid_ || done < 0) {
                pid_ = -1;
                return;
            }
            usleep(10'000);
        }
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

std::string ExternalGenerator::read_line() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
        auto newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            return line;
        }

        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            throw TransportError("external generator timed out after " +
                                 std::to_string(timeout_.count()) + " ms");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw TransportError("poll() failed: " + std::string(std::strerror(errno)));
        }
        if (ready == 0) {
            throw TransportError("external generator timed out after " +
                                 std::to_string(timeout_.count()) + " ms");
        }
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw TransportError("read() from external generator failed: " +
                                 std::string(std::strerror(errno)));
        }
        if (n == 0) {
            throw TransportError("external generator closed its output stream");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string ExternalGenerator::round_trip(const std::string& request_line) {
    ensure_started();
    std::size_t written = 0;
    while (written < request_line.size()) {
        ssize_t n = write(to_child_, request_line.data() + written, request_line.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw TransportError("write() to external generator failed: " +
                                 std::string(std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
    return read_line();
}

GenerationResult ExternalGenerator::generate(const std::string& prompt,
                                             const std::vector<std::string>& /*history_titles*/,
                                             int m, int max_tokens) {
    std::lock_guard<std::mutex> lock(mutex_);

    nlohmann::json request;
    request["prompt"] = prompt;
    request["num_queries"] = m;
    request["max_tokens"] = max_tokens;
    const std::string response_line = round_trip(request.dump() + "\n");

    nlohmann::json response = nlohmann::json::parse(response_line, nullptr, false);
    if (response.is_discarded()) {
        throw ProtocolError("external generator sent a non-JSON line: " + excerpt(response_line));
    }
    if (!response.is_object() || !response.contains("queries") || !response["queries"].is_array()) {
        throw ProtocolError("external generator response has no \"queries\" array: " +
                            excerpt(response_line));
    }
    const auto& queries = response["queries"];
    if (queries.size() != static_cast<std::size_t>(m)) {
        throw ProtocolError("external generator returned " + std::to_string(queries.size()) +
                            " queries, expected " + std::to_string(m));
    }

    GenerationResult result;
    for (const auto& entry : queries) {
        if (!entry.is_object() || !entry.contains("text") || !entry["text"].is_string() ||
            !entry.contains("score") || !entry["score"].is_number()) {
            throw ProtocolError("external generator query entry is malformed: " + excerpt(entry.dump()));
        }
        double score = entry["score"].get<double>();
        if (!std::isfinite(score)) {
            throw ProtocolError("external generator returned a non-finite score");
        }
        result.queries.push_back(Query{entry["text"].get<std::string>(), score});
    }
    return result;
}

} // namespace queryrec

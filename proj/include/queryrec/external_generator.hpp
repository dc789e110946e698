#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <sys/types.h>

#include "queryrec/generator.hpp"

namespace queryrec {

/// Query source backed by a child process speaking line-delimited JSON on
/// its standard streams: one request line
///   {"prompt": ..., "num_queries": m, "max_tokens": ...}
/// answered by exactly one response line
///   {"queries": [{"text": ..., "score": ...}, ...]}
/// with exactly m queries and finite scores.
///
/// The child is spawned lazily on the first request and kept alive across
/// requests. Access is serialized; concurrent callers take turns.
///
/// Throws TransportError when the child cannot be reached (spawn failure,
/// timeout, early exit) and ProtocolError when it answers but violates the
/// contract.
class ExternalGenerator : public QueryGenerator {
public:
    explicit ExternalGenerator(std::string command,
                               std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~ExternalGenerator() override;

    ExternalGenerator(const ExternalGenerator&) = delete;
    ExternalGenerator& operator=(const ExternalGenerator&) = delete;

    GenerationResult generate(const std::string& prompt,
                              const std::vector<std::string>& history_titles, int m,
                              int max_tokens) override;

private:
    void ensure_started();
    void shutdown();
    std::string round_trip(const std::string& request_line);
    std::string read_line();

    std::string command_;
    std::chrono::milliseconds timeout_;
    std::mutex mutex_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

} // namespace queryrec

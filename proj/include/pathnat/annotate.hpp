#pragma once
// Annotation service behind the questionnaire UI.
//
//   GET  /questionnaire?seed=N             JSON lines, one item per line, no QC data
//   POST /response?seed=N&annotator=ID    body: JSON lines {"item","choice"}
//   GET  /progress                        JSON summary
//
// Handlers are plain functions so they can be exercised without sockets;
// serve_http binds them to an HTTP listener.

#include "pathnat/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pathnat {

struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

class AnnotationService {
public:
    using Clock = std::function<std::int64_t()>;

    /// The graph, store and pools must outlive the service. When qc_pairs_file
    /// is set, the QC pairs of every accepted questionnaire are appended to it
    /// (once per questionnaire) so stored judgments always name a known pair.
    AnnotationService(const Graph& graph, std::vector<PathPair> pool, std::vector<LabeledPath> good_paths,
                      JudgmentStore& store, std::optional<std::filesystem::path> qc_pairs_file = std::nullopt,
                      Clock clock = {});

    HttpReply get_questionnaire(const std::map<std::string, std::string>& params);
    HttpReply post_response(const std::map<std::string, std::string>& params, const std::string& body);
    HttpReply get_progress() const;

    /// Routes by method and path; unknown routes give 404.
    HttpReply handle(std::string_view method, std::string_view path, const std::map<std::string, std::string>& params,
                     const std::string& body);

    /// Builds (and caches) the questionnaire for a seed.
    const Questionnaire& questionnaire(std::uint64_t seed);

private:
    const Graph& graph_;
    std::vector<PathPair> pool_;
    std::vector<LabeledPath> good_paths_;
    JudgmentStore& store_;
    std::optional<std::filesystem::path> qc_pairs_file_;
    Clock clock_;

    mutable std::mutex mutex_;
    std::map<std::uint64_t, Questionnaire> cache_;
    std::map<std::uint64_t, bool> qc_written_;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

/// "host:port" from the flag value, else PATHNAT_ANNOTATE_ADDR, else 127.0.0.1:8080.
std::pair<std::string, int> listen_address(const std::string& flag);

/// Receives the bound port (useful with port 0) and a function that stops the server.
using ReadyCallback = std::function<void(int port, std::function<void()> stop)>;

/// Blocks until the server stops. `on_ready` runs on a helper thread once
/// the server accepts connections.
void serve_http(AnnotationService& service, const std::string& host, int port, const ReadyCallback& on_ready = {});

}  // namespace pathnat

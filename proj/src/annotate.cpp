#include "pathnat/annotate.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace pathnat {

using nlohmann::json;

namespace {

HttpReply error_reply(int status, const std::string& message) {
    return {status, "application/json", json{{"error", message}}.dump() + "\n"};
}

std::uint64_t parse_seed(const std::map<std::string, std::string>& params) {
    auto it = params.find("seed");
    if (it == params.end() || it->second.empty()) throw Error("missing seed parameter");
    std::uint64_t v = 0;
    for (char c : it->second) {
        if (c < '0' || c > '9') throw Error("seed must be a non-negative integer");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

std::int64_t wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

AnnotationService::AnnotationService(const Graph& graph, std::vector<PathPair> pool,
                                     std::vector<LabeledPath> good_paths, JudgmentStore& store,
                                     std::optional<std::filesystem::path> qc_pairs_file, Clock clock)
    : graph_(graph),
      pool_(std::move(pool)),
      good_paths_(std::move(good_paths)),
      store_(store),
      qc_pairs_file_(std::move(qc_pairs_file)),
      clock_(clock ? std::move(clock) : Clock(wall_clock)) {
    if (pool_.size() < kGenuineItems || good_paths_.size() < kQcItems) {
        throw Error("insufficient pool for questionnaires");
    }
}

const Questionnaire& AnnotationService::questionnaire(std::uint64_t seed) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(seed);
    if (it == cache_.end()) it = cache_.emplace(seed, build_questionnaire(pool_, good_paths_, graph_, seed)).first;
    return it->second;
}

HttpReply AnnotationService::get_questionnaire(const std::map<std::string, std::string>& params) {
    std::uint64_t seed;
    try {
        seed = parse_seed(params);
    } catch (const Error& e) {
        return error_reply(400, e.what());
    }
    return {200, "application/x-ndjson", questionnaire_to_jsonl(questionnaire(seed))};
}

HttpReply AnnotationService::post_response(const std::map<std::string, std::string>& params,
                                           const std::string& body) {
    std::uint64_t seed;
    std::vector<Answer> answers;
    try {
        seed = parse_seed(params);
        std::istringstream in(body);
        answers = read_answers(in);
    } catch (const std::exception& e) {
        return error_reply(400, e.what());
    }
    auto ann = params.find("annotator");
    if (ann == params.end() || ann->second.empty()) return error_reply(400, "missing annotator parameter");

    const auto& q = questionnaire(seed);
    auto verdict = validate_response(q, answers, ann->second, clock_());
    json reply;
    reply["qc_correct"] = verdict.qc_correct;
    reply["qc_total"] = q.qc_count();
    if (!verdict.accepted) {
        std::lock_guard lock(mutex_);
        ++rejected_;
        reply["status"] = "rejected";
        reply["reason"] = to_string(*verdict.reason);
        reply["stored"] = 0;
        return {200, "application/json", reply.dump() + "\n"};
    }
    {
        std::lock_guard lock(mutex_);
        if (qc_pairs_file_ && !qc_written_[seed]) {
            std::vector<PathPair> qc;
            for (auto& p : q.pairs()) {
                if (p.id.rfind("qc-", 0) == 0) qc.push_back(std::move(p));
            }
            std::ofstream out(*qc_pairs_file_, std::ios::app);
            if (!out) return error_reply(500, "cannot write " + qc_pairs_file_->string());
            write_pairs(out, qc);
            qc_written_[seed] = true;
        }
        ++accepted_;
    }
    store_.append(verdict.judgments);
    reply["status"] = "accepted";
    reply["stored"] = verdict.judgments.size();
    return {200, "application/json", reply.dump() + "\n"};
}

HttpReply AnnotationService::get_progress() const {
    const auto judgments = store_.snapshot();
    std::set<std::string> annotators;
    std::set<std::string> pairs;
    for (const auto& j : judgments) {
        annotators.insert(j.annotator);
        pairs.insert(j.pair_id);
    }
    std::lock_guard lock(mutex_);
    json reply{{"judgments", judgments.size()},
               {"annotators", annotators.size()},
               {"pairs_judged", pairs.size()},
               {"responses_accepted", accepted_},
               {"responses_rejected", rejected_},
               {"pool_size", pool_.size()}};
    return {200, "application/json", reply.dump() + "\n"};
}

HttpReply AnnotationService::handle(std::string_view method, std::string_view path,
                                    const std::map<std::string, std::string>& params, const std::string& body) {
    if (path == "/questionnaire") {
        if (method != "GET") return error_reply(405, "method not allowed");
        return get_questionnaire(params);
    }
    if (path == "/response") {
        if (method != "POST") return error_reply(405, "method not allowed");
        return post_response(params, body);
    }
    if (path == "/progress") {
        if (method != "GET") return error_reply(405, "method not allowed");
        return get_progress();
    }
    return error_reply(404, "not found");
}

std::pair<std::string, int> listen_address(const std::string& flag) {
    std::string addr = flag;
    if (addr.empty()) {
        if (const char* env = std::getenv("PATHNAT_ANNOTATE_ADDR")) addr = env;
    }
    if (addr.empty()) addr = "127.0.0.1:8080";
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw Error("listen address must be host:port");
    const auto port_text = addr.substr(colon + 1);
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(port_text, &used);
        if (used != port_text.size()) throw std::invalid_argument("port");
    } catch (const std::exception&) {
        throw Error("bad port in listen address '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw Error("port out of range");
    return {addr.substr(0, colon), port};
}

void serve_http(AnnotationService& service, const std::string& host, int port,
                const ReadyCallback& on_ready) {
    httplib::Server server;
    auto bind = [&service](std::string method) {
        return [&service, method](const httplib::Request& req, httplib::Response& res) {
            std::map<std::string, std::string> params;
            for (const auto& [k, v] : req.params) params.emplace(k, v);
            const auto reply = service.handle(method, req.path, params, req.body);
            res.status = reply.status;
            res.set_content(reply.body, reply.content_type.c_str());
        };
    };
    for (const char* route : {"/questionnaire", "/response", "/progress"}) {
        server.Get(route, bind("GET"));
        server.Post(route, bind("POST"));
    }
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    std::thread notifier;
    if (on_ready) {
        notifier = std::thread([&server, &on_ready, bound] {
            server.wait_until_ready();
            on_ready(bound, [&server] { server.stop(); });
        });
    }
    server.listen_after_bind();
    if (notifier.joinable()) notifier.join();
}

}  // namespace pathnat

#include "coderag/corpus.hpp"
#include "coderag/error.hpp"
#include "coderag/metrics.hpp"
#include "coderag/prompt.hpp"
#include "coderag/protocol.hpp"
#include "coderag/providers.hpp"
#include "coderag/retrieval.hpp"
#include "coderag/tokenizer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace coderag;

namespace {

std::vector<RetrievalUnit> units_from_pairs(const std::vector<std::pair<UnitId, std::string>>& pairs) {
    std::vector<RetrievalUnit> units;
    units.reserve(pairs.size());
    for (const auto& [id, content] : pairs) {
        RetrievalUnit u;
        u.id = id;
        u.source_path = "unit/" + std::to_string(id);
        u.content = content;
        u.token_count = count_tokens(content);
        units.push_back(std::move(u));
    }
    return units;
}

py::list results_to_list(const TopK& top) {
    py::list out;
    for (const auto& r : top.results) out.append(py::make_tuple(r.unit_id, r.score, r.rank));
    return out;
}

py::dict unit_to_dict(const RetrievalUnit& u) {
    py::dict d;
    d["id"] = u.id;
    d["source_path"] = u.source_path;
    d["kind"] = std::string(to_string(u.kind));
    d["name"] = u.name ? py::cast(*u.name) : py::none();
    d["start_line"] = u.start_line;
    d["end_line"] = u.end_line;
    d["content"] = u.content;
    d["token_count"] = u.token_count;
    return d;
}

/// Lexical index over (id, text) pairs.
class PyLexicalIndex {
public:
    explicit PyLexicalIndex(LexicalIndex index) : index_(std::move(index)) {}
    static PyLexicalIndex build(const std::vector<std::pair<UnitId, std::string>>& units, double k1, double b) {
        return PyLexicalIndex(LexicalIndex::build(units_from_pairs(units), Bm25Params{k1, b}));
    }
    py::list topk(const std::string& query, std::size_t k) const { return results_to_list(index_.topk(query, k)); }
    double score(const std::string& query, UnitId id) const { return index_.score(tokenize_for_index(query), id); }
    std::size_t size() const { return index_.doc_count(); }
    void save(const std::filesystem::path& p) const { index_.save(p); }
    static PyLexicalIndex load(const std::filesystem::path& p) { return PyLexicalIndex(LexicalIndex::load(p)); }

private:
    LexicalIndex index_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Retrieval-augmented code completion toolkit";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", data.ptr());
    auto provider = py::register_exception<ProviderError>(m, "ProviderError", base.ptr());
    py::register_exception<ProtocolError>(m, "ProtocolError", provider.ptr());
    py::register_exception<QualityGateError>(m, "QualityGateError", base.ptr());

    m.def("tokens", [](const std::string& text) {
        auto v = default_tokenizer().tokens(text);
        return std::vector<std::string>(v.begin(), v.end());
    }, py::arg("text"));
    m.def("count_tokens", [](const std::string& text) { return count_tokens(text); }, py::arg("text"));
    m.def("index_terms", &tokenize_for_index, py::arg("text"));

    m.def("normalize_line", &normalize_line, py::arg("text"));
    m.def("exact_match", &exact_match, py::arg("prediction"), py::arg("target"));
    m.def("edit_similarity", &edit_similarity, py::arg("prediction"), py::arg("target"));
    m.def("bleu", [](const std::string& p, const std::string& t, int max_n) { return bleu(p, t, max_n); },
          py::arg("prediction"), py::arg("target"), py::arg("max_n") = 4);
    m.def("score", [](const std::string& p, const std::string& t) {
        const auto r = score_prediction(0, p, t);
        py::dict d;
        d["em"] = r.em;
        d["es"] = r.es;
        d["bleu"] = r.bleu;
        return d;
    }, py::arg("prediction"), py::arg("target"), "em, es and bleu of one normalized line pair");

    m.def("segment", [](const std::string& path, const std::string& content, UnitId first_id) {
        const auto outcome = segment(make_source_file(path, content), first_id);
        py::list units;
        for (const auto& u : outcome.units) units.append(unit_to_dict(u));
        return units;
    }, py::arg("path"), py::arg("content"), py::arg("first_id") = 0);

    py::class_<PyLexicalIndex>(m, "LexicalIndex")
        .def_static("build", &PyLexicalIndex::build, py::arg("units"), py::arg("k1") = 1.2, py::arg("b") = 0.75,
                    "Index (id, text) pairs.")
        .def_static("load", &PyLexicalIndex::load, py::arg("path"))
        .def("topk", &PyLexicalIndex::topk, py::arg("query"), py::arg("k"), "List of (id, score, rank).")
        .def("score", &PyLexicalIndex::score, py::arg("query"), py::arg("id"))
        .def("save", &PyLexicalIndex::save, py::arg("path"))
        .def("__len__", &PyLexicalIndex::size);

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_sim(EmbeddingVector{a}, EmbeddingVector{b});
    }, py::arg("a"), py::arg("b"));
    m.def("mock_embed", [](const std::string& text, std::size_t dims, std::uint64_t seed) {
        return mock_embed(text, dims, seed).values;
    }, py::arg("text"), py::arg("dims"), py::arg("seed") = 0);

    m.def("similarity_prompt", [](const std::vector<std::pair<UnitId, double>>& ranked,
                                  const std::vector<std::pair<UnitId, std::string>>& units, const std::string& query,
                                  std::size_t max_prompt_tokens, const std::string& separator) {
        const auto owned = units_from_pairs(units);
        const UnitCatalog catalog(owned);
        std::vector<RetrievalResult> results;
        for (std::size_t i = 0; i < ranked.size(); ++i) results.push_back({ranked[i].first, ranked[i].second, i + 1});
        PromptConfig cfg;
        cfg.max_prompt_tokens = max_prompt_tokens;
        cfg.separator = separator;
        const auto b = assemble_similarity_prompt(results, catalog, query, cfg);
        py::dict d;
        d["prompt"] = b.prompt_text;
        d["unit_ids"] = b.included_unit_ids;
        d["tokens"] = b.prompt_token_count;
        d["truncated"] = b.truncated;
        return d;
    }, py::arg("ranked"), py::arg("units"), py::arg("query"), py::arg("max_prompt_tokens") = 3584,
       py::arg("separator") = "\n\n",
       "ranked: (id, score) by descending score; units: (id, text) pairs.");

    m.def("copy_oracle_answer", [](const std::string& prompt) { return copy_oracle_answer(prompt, {}); },
          py::arg("prompt"));

    auto proto = m.def_submodule("protocol", "JSON wire protocol of the embedding and completion servers");
    proto.def("embed_request", [](const std::string& model, const std::vector<std::string>& texts) {
        return protocol::to_json(protocol::EmbedRequest{model, texts}).dump();
    }, py::arg("model"), py::arg("texts"));
    proto.def("parse_embed_request", [](const std::string& body) {
        const auto r = protocol::parse_embed_request(protocol::parse_body(body));
        return py::make_tuple(r.model, r.texts);
    }, py::arg("body"));
    proto.def("embed_response", [](const std::vector<std::vector<double>>& vectors, std::size_t dims,
                                   const std::string& model) {
        return protocol::to_json(protocol::EmbedResponse{vectors, dims, model}).dump();
    }, py::arg("vectors"), py::arg("dims"), py::arg("model"));
    proto.def("parse_embed_response", [](const std::string& body) {
        const auto r = protocol::parse_embed_response(protocol::parse_body(body));
        return py::make_tuple(r.vectors, r.dims, r.model);
    }, py::arg("body"));
    proto.def("check_embedding_server", [](const std::string& endpoint, const std::string& model, std::size_t dims,
                                           int timeout_ms) {
        protocol::ConformanceOptions o;
        o.endpoint = endpoint;
        o.model = model;
        o.dims = dims;
        o.timeout_ms = timeout_ms;
        py::list out;
        {
            py::gil_scoped_release release;
            auto checks = protocol::check_embedding_server(o);
            py::gil_scoped_acquire acquire;
            for (const auto& c : checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
        }
        return out;
    }, py::arg("endpoint"), py::arg("model") = "", py::arg("dims") = 0, py::arg("timeout_ms") = 30000,
       "Runs the conformance fixtures; returns (name, passed, detail) tuples.");
}

// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NULLLAB_TESTS_CORPUS_HPP
#define NULLLAB_TESTS_CORPUS_HPP

// Access to the bundled scenario files and their golden diagnostics.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nulllab/dsl.hpp"

namespace nulllab::testing {

inline std::filesystem::path data_dir() { return NULLLAB_DATA_DIR; }

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A valid corpus file and the built-in it transcribes.
struct Transcription {
    std::string file;
    std::string builtin;
};

inline const std::vector<Transcription> &transcriptions() {
    static const std::vector<Transcription> list = {
        {"bomb.scn", "bomb-live"},
        {"sg.scn", "stern-gerlach"},
        {"renninger.scn", "renninger"},
    };
    return list;
}

inline dsl::LoweredScenario load_file(const std::string &file) {
    auto source = read_text(data_dir() / file);
    auto parsed = dsl::parse(source);
    if (!parsed.ok()) {
        throw std::runtime_error(file + ":" + parsed.errors.front().to_string());
    }
    return dsl::lower(*parsed.doc, std::filesystem::path(file).stem().string());
}

struct Diagnostic {
    std::string file;
    int line = 0;
    int column = 0;
    std::string kind;  // "parse" or a semantic kind

    friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

inline std::ostream &operator<<(std::ostream &os, const Diagnostic &d) {
    return os << d.file << " " << d.line << ":" << d.column << " " << d.kind;
}

/// Every diagnostic the front end reports for `file` under invalid/.
inline std::vector<Diagnostic> diagnose(const std::string &file) {
    auto source = read_text(data_dir() / "invalid" / file);
    std::vector<Diagnostic> out;
    auto parsed = dsl::parse(source);
    for (const auto &e : parsed.errors) {
        out.push_back({file, e.line, e.column, "parse"});
    }
    if (parsed.ok()) {
        for (const auto &e : dsl::validate(*parsed.doc)) {
            out.push_back({file, e.pos.line, e.pos.column, std::string(dsl::to_string(e.kind))});
        }
    }
    return out;
}

inline std::vector<Diagnostic> golden_diagnostics() {
    std::istringstream in(read_text(data_dir() / "invalid" / "golden.txt"));
    std::vector<Diagnostic> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        Diagnostic d;
        std::istringstream fields(line);
        fields >> d.file >> d.line >> d.column >> d.kind;
        out.push_back(d);
    }
    return out;
}

/// Files named in the golden list, each once, in list order.
inline std::vector<std::string> invalid_files() {
    std::vector<std::string> files;
    for (const auto &d : golden_diagnostics()) {
        if (files.empty() || files.back() != d.file) {
            files.push_back(d.file);
        }
    }
    return files;
}

}  // namespace nulllab::testing

#endif  // NULLLAB_TESTS_CORPUS_HPP

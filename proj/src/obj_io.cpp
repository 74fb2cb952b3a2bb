#include "dpoint/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace dpoint {

namespace {

int parse_face_index(const std::string& token, int line_no) {
    // forms: "v", "v/vt", "v//vn", "v/vt/vn"
    std::size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    int idx = 0;
    try {
        std::size_t pos = 0;
        idx = std::stoi(head, &pos);
        if (pos != head.size()) throw std::invalid_argument("trailing chars");
    } catch (const std::exception&) {
        throw std::runtime_error("obj: malformed face index '" + token + "' at line " +
                                 std::to_string(line_no));
    }
    if (idx <= 0)
        throw std::runtime_error("obj: face index must be positive (1-based), got '" + token +
                                 "' at line " + std::to_string(line_no));
    return idx - 1;
}

}  // namespace

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("obj: cannot open '" + path + "'");

    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x() >> p.y() >> p.z()))
                throw std::runtime_error("obj: malformed vertex at line " + std::to_string(line_no));
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ss >> token) idx.push_back(parse_face_index(token, line_no));
            if (idx.size() != 3)
                throw std::runtime_error("obj: only triangle faces supported, line " +
                                         std::to_string(line_no));
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
        // vt/vn/comments/groups ignored
    }
    if (mesh.vertices.empty() || mesh.triangles.empty())
        throw std::runtime_error("obj: no v/f records in '" + path + "'");

    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v >= mesh.num_vertices())
                throw std::runtime_error("obj: face references missing vertex in '" + path + "'");

    // Drop isolated vertices, remapping faces.
    std::vector<char> used(mesh.vertices.size(), 0);
    for (const auto& t : mesh.triangles)
        for (int v : t) used[v] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
        std::vector<int> remap(mesh.vertices.size(), -1);
        std::vector<Vec3> kept;
        int dropped = 0;
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            if (used[v]) {
                remap[v] = static_cast<int>(kept.size());
                kept.push_back(mesh.vertices[v]);
            } else {
                ++dropped;
            }
        }
        for (auto& t : mesh.triangles)
            for (int& v : t) v = remap[v];
        mesh.vertices = std::move(kept);
        std::cerr << "warning: obj '" << path << "': dropped " << dropped
                  << " isolated vertices\n";
    }

    MeshTopology topo(mesh);  // validates manifoldness, throws otherwise
    (void)topo;
    return mesh;
}

void save_obj(const TriMesh& mesh, const std::optional<PlanarParam>& uv,
              const std::string& path) {
    if (uv && static_cast<int>(uv->size()) != mesh.num_vertices())
        throw std::runtime_error("obj: uv count does not match vertex count");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("obj: cannot write '" + path + "'");
    char buf[128];
    for (const auto& p : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.6g %.6g %.6g\n", p.x(), p.y(), p.z());
        out << buf;
    }
    if (uv) {
        for (const auto& t : *uv) {
            std::snprintf(buf, sizeof(buf), "vt %.6g %.6g\n", t.x(), t.y());
            out << buf;
        }
    }
    for (const auto& t : mesh.triangles) {
        if (uv)
            out << "f " << t[0] + 1 << '/' << t[0] + 1 << ' ' << t[1] + 1 << '/' << t[1] + 1
                << ' ' << t[2] + 1 << '/' << t[2] + 1 << '\n';
        else
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!out)
        throw std::runtime_error("obj: write failure on '" + path + "'");
}

}  // namespace dpoint

#include "patchbench/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "patchbench/errors.hpp"

namespace patchbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint8_t to_byte(float v)
{
    const float clamped = std::clamp(v, 0.0f, 1.0f);
    return static_cast<std::uint8_t>(clamped * 255.0f + 0.5f);
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode | std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode | std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    return in;
}

/// Read one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in)
{
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty())
        throw IoError("malformed PGM header");
    return tok;
}

constexpr const char* kStripNames[3][5] = {
    {"e1.pgm", "e2.pgm", "e3.pgm", "e4.pgm", "e5.pgm"},
    {"h1.pgm", "h2.pgm", "h3.pgm", "h4.pgm", "h5.pgm"},
    {"t1.pgm", "t2.pgm", "t3.pgm", "t4.pgm", "t5.pgm"},
};

} // namespace

void write_pgm(const fs::path& path, const Image& img)
{
    std::ofstream out = open_out(path);
    out << "P5\n" << image_width(img) << " " << image_height(img) << "\n255\n";
    std::vector<std::uint8_t> row(image_width(img));
    for (int y = 0; y < image_height(img); ++y) {
        for (int x = 0; x < image_width(img); ++x)
            row[x] = to_byte(img(y, x));
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

Image read_pgm(const fs::path& path)
{
    std::ifstream in = open_in(path);
    if (pgm_token(in) != "P5")
        throw IoError("not a binary PGM: " + path.string());
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(pgm_token(in));
        h = std::stoi(pgm_token(in));
        maxval = std::stoi(pgm_token(in));
    } catch (const std::exception&) {
        throw IoError("malformed PGM header: " + path.string());
    }
    if (w <= 0 || h <= 0)
        throw IoError("bad PGM dimensions: " + path.string());
    if (maxval != 255)
        throw IoError("unsupported PGM maxval (expected 255): " + path.string());

    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size()))
        throw IoError("truncated PGM payload: " + path.string());

    Image img(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img(y, x) = static_cast<float>(data[static_cast<std::size_t>(y) * w + x]) / 255.0f;
    return img;
}

void write_homographies(const fs::path& path, const std::array<Homography, 5>& hs)
{
    std::ofstream out = open_out(path);
    char buf[32];
    for (const Homography& h : hs) {
        for (int i = 0; i < 9; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", h(i / 3, i % 3));
            out << buf << (i == 8 ? "\n" : " ");
        }
    }
}

std::array<Homography, 5> read_homographies(const fs::path& path)
{
    std::ifstream in = open_in(path);
    std::array<Homography, 5> hs;
    for (int k = 0; k < 5; ++k) {
        Eigen::Matrix3d m;
        for (int i = 0; i < 9; ++i)
            if (!(in >> m(i / 3, i % 3)))
                throw IoError("malformed homography file: " + path.string());
        hs[k] = m;
    }
    return hs;
}

void write_patch_strip(const fs::path& path, const std::vector<Patch>& patches)
{
    std::ofstream out = open_out(path);
    out << "P5\n" << kPatchSide << " " << kPatchSide * patches.size() << "\n255\n";
    std::vector<std::uint8_t> row(kPatchSide);
    for (const Patch& p : patches)
        for (int y = 0; y < kPatchSide; ++y) {
            for (int x = 0; x < kPatchSide; ++x)
                row[x] = to_byte(p(y, x));
            out.write(reinterpret_cast<const char*>(row.data()), row.size());
        }
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::vector<Patch> read_patch_strip(const fs::path& path)
{
    const Image strip = read_pgm(path);
    if (image_width(strip) != kPatchSide)
        throw IoError("patch strip width must be 65: " + path.string());
    if (image_height(strip) % kPatchSide != 0)
        throw IoError("strip height not divisible by 65: " + path.string());

    const int n = image_height(strip) / kPatchSide;
    std::vector<Patch> patches(n);
    for (int j = 0; j < n; ++j)
        patches[j] = strip.block(j * kPatchSide, 0, kPatchSide, kPatchSide);
    return patches;
}

namespace {

void write_regions(const fs::path& path, const std::vector<RegionDetection>& regions)
{
    std::ofstream out = open_out(path);
    char buf[160];
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const RegionDetection& r = regions[i];
        std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g %.17g\n", i, r.cx, r.cy,
                      r.m, r.theta);
        out << buf;
    }
}

std::vector<RegionDetection> read_regions(const fs::path& path)
{
    std::ifstream in = open_in(path);
    std::vector<RegionDetection> regions;
    std::size_t idx;
    RegionDetection r;
    while (in >> idx >> r.cx >> r.cy >> r.m >> r.theta) {
        if (idx != regions.size())
            throw IoError("non-contiguous region ids: " + path.string());
        regions.push_back(r);
    }
    return regions;
}

json profile_to_json(const NoiseProfile& p)
{
    return json{{"theta_max_deg", p.theta_max_deg},
                {"t_max", p.t_max},
                {"s_max", p.s_max},
                {"a_max", p.a_max}};
}

void check_profile(const json& j, NoiseLevel level)
{
    const NoiseProfile expected = noise_profile(level);
    const json& entry = j.at(expected.name);
    if (entry.at("theta_max_deg").get<double>() != expected.theta_max_deg ||
        entry.at("t_max").get<double>() != expected.t_max ||
        entry.at("s_max").get<double>() != expected.s_max ||
        entry.at("a_max").get<double>() != expected.a_max)
        throw IoError("manifest noise profile table does not match the presets");
}

} // namespace

void save_sequence_dir(const SequencePatches& sp, const fs::path& corpus_dir)
{
    std::error_code ec;
    const fs::path seq_dir = corpus_dir / sp.id;
    fs::create_directories(seq_dir, ec);
    if (ec)
        throw IoError("cannot create sequence directory: " + seq_dir.string());

    write_patch_strip(seq_dir / "ref.pgm", sp.ref);
    for (int v = 0; v < 3; ++v)
        for (int k = 0; k < 5; ++k) {
            std::vector<Patch> strip;
            strip.reserve(sp.group_count());
            for (int g = 0; g < sp.group_count(); ++g)
                strip.push_back(sp.targets[v][g * 5 + k]);
            write_patch_strip(seq_dir / kStripNames[v][k], strip);
        }

    if (sp.has_geometry)
        write_homographies(seq_dir / "homographies.txt", sp.homographies);

    {
        std::ofstream out = open_out(seq_dir / "groups.txt");
        for (int id : sp.region_ids)
            out << id << "\n";
    }
    if (!sp.all_detections.empty())
        write_regions(seq_dir / "regions.txt", sp.all_detections);
    if (sp.source) {
        write_pgm(seq_dir / "image_ref.pgm", sp.source->ref);
        for (int k = 0; k < 5; ++k)
            write_pgm(seq_dir / ("image_t" + std::to_string(k + 1) + ".pgm"),
                      sp.source->targets[k]);
    }
}

void write_corpus_manifest(const PatchCorpus& corpus, const fs::path& dir)
{
    json manifest;
    manifest["format_version"] = 1;
    manifest["master_seed"] = corpus.master_seed;
    manifest["rho"] = corpus.rho;
    json profiles;
    for (NoiseLevel level : kVariants) {
        const NoiseProfile p = noise_profile(level);
        profiles[p.name] = profile_to_json(p);
    }
    manifest["noise_profiles"] = profiles;

    json seq_list = json::array();
    for (int si = 0; si < static_cast<int>(corpus.sequences.size()); ++si) {
        const SequencePatches& sp = corpus.sequences[si];
        const bool is_fit = std::find(corpus.fit_split.begin(), corpus.fit_split.end(),
                                      si) != corpus.fit_split.end();
        seq_list.push_back(json{{"id", sp.id},
                                {"kind", sequence_kind_name(sp.kind)},
                                {"groups", sp.group_count()},
                                {"split", is_fit ? "fit" : "eval"}});
    }
    manifest["sequences"] = seq_list;

    std::ofstream out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

void save_corpus(const PatchCorpus& corpus, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create corpus directory: " + dir.string());
    for (const SequencePatches& sp : corpus.sequences)
        save_sequence_dir(sp, dir);
    write_corpus_manifest(corpus, dir);
}

PatchCorpus load_corpus(const fs::path& dir)
{
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw MissingCorpusError("no manifest.json under " + dir.string());

    json manifest;
    try {
        std::ifstream in = open_in(manifest_path);
        in >> manifest;
    } catch (const json::exception& e) {
        throw IoError("malformed manifest: " + std::string(e.what()));
    }

    PatchCorpus corpus;
    corpus.master_seed = manifest.at("master_seed").get<std::uint64_t>();
    corpus.rho = manifest.at("rho").get<double>();
    for (NoiseLevel level : kVariants)
        check_profile(manifest.at("noise_profiles"), level);

    int si = 0;
    for (const json& entry : manifest.at("sequences")) {
        SequencePatches sp;
        sp.id = entry.at("id").get<std::string>();
        sp.kind = entry.at("kind").get<std::string>() == "illumination"
                      ? SequenceKind::Illumination
                      : SequenceKind::Viewpoint;
        const fs::path seq_dir = dir / sp.id;
        if (!fs::exists(seq_dir))
            throw IoError("manifest references missing sequence: " + sp.id);

        sp.ref = read_patch_strip(seq_dir / "ref.pgm");
        const int n = static_cast<int>(sp.ref.size());
        for (int v = 0; v < 3; ++v) {
            sp.targets[v].resize(static_cast<std::size_t>(n) * 5);
            for (int k = 0; k < 5; ++k) {
                std::vector<Patch> strip = read_patch_strip(seq_dir / kStripNames[v][k]);
                if (static_cast<int>(strip.size()) != n)
                    throw IoError("inconsistent patch count in " +
                                  (seq_dir / kStripNames[v][k]).string());
                for (int g = 0; g < n; ++g)
                    sp.targets[v][g * 5 + k] = strip[g];
            }
        }

        if (fs::exists(seq_dir / "homographies.txt")) {
            sp.homographies = read_homographies(seq_dir / "homographies.txt");
            sp.has_geometry = true;
        } else {
            sp.homographies.fill(Homography::Identity());
            sp.has_geometry = false;
        }

        {
            std::ifstream in = open_in(seq_dir / "groups.txt");
            int id;
            while (in >> id)
                sp.region_ids.push_back(id);
            if (static_cast<int>(sp.region_ids.size()) != n)
                throw IoError("groups.txt does not match patch count: " + sp.id);
        }
        if (fs::exists(seq_dir / "regions.txt")) {
            sp.all_detections = read_regions(seq_dir / "regions.txt");
            for (int id : sp.region_ids) {
                if (id < 0 || id >= static_cast<int>(sp.all_detections.size()))
                    throw IoError("group id out of range: " + sp.id);
                sp.regions.push_back(sp.all_detections[id]);
            }
        }
        if (fs::exists(seq_dir / "image_ref.pgm")) {
            Sequence source;
            source.id = sp.id;
            source.kind = sp.kind;
            source.ref = read_pgm(seq_dir / "image_ref.pgm");
            for (int k = 0; k < 5; ++k)
                source.targets[k] =
                    read_pgm(seq_dir / ("image_t" + std::to_string(k + 1) + ".pgm"));
            source.homographies = sp.homographies;
            sp.source = std::move(source);
        }

        if (entry.at("split").get<std::string>() == "fit")
            corpus.fit_split.push_back(si);
        corpus.sequences.push_back(std::move(sp));
        ++si;
    }
    return corpus;
}

PatchCorpus ingest_external(const fs::path& dir)
{
    if (!fs::exists(dir))
        throw MissingCorpusError("no such directory: " + dir.string());
    if (fs::exists(dir / "manifest.json"))
        return load_corpus(dir);

    std::vector<fs::path> seq_dirs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "ref.pgm"))
            seq_dirs.push_back(entry.path());
    std::sort(seq_dirs.begin(), seq_dirs.end());
    if (seq_dirs.empty())
        throw MissingCorpusError("no sequences (subdirectories with ref.pgm) under " +
                                 dir.string());

    PatchCorpus corpus;
    for (const fs::path& seq_dir : seq_dirs) {
        SequencePatches sp;
        sp.id = seq_dir.filename().string();
        sp.kind = sp.id.rfind("i_", 0) == 0 ? SequenceKind::Illumination
                                            : SequenceKind::Viewpoint;
        sp.ref = read_patch_strip(seq_dir / "ref.pgm");
        const int n = static_cast<int>(sp.ref.size());
        for (int v = 0; v < 3; ++v) {
            sp.targets[v].resize(static_cast<std::size_t>(n) * 5);
            for (int k = 0; k < 5; ++k) {
                std::vector<Patch> strip = read_patch_strip(seq_dir / kStripNames[v][k]);
                if (static_cast<int>(strip.size()) != n)
                    throw IoError("inconsistent patch count across strips in " +
                                  seq_dir.string());
                for (int g = 0; g < n; ++g)
                    sp.targets[v][g * 5 + k] = strip[g];
            }
        }
        if (fs::exists(seq_dir / "homographies.txt")) {
            sp.homographies = read_homographies(seq_dir / "homographies.txt");
            sp.has_geometry = true;
        } else {
            sp.homographies.fill(Homography::Identity());
            sp.has_geometry = false;
        }
        sp.region_ids.resize(n);
        for (int g = 0; g < n; ++g)
            sp.region_ids[g] = g;
        corpus.sequences.push_back(std::move(sp));
    }
    return corpus;
}

StoredSequence load_stored_sequence(const fs::path& corpus_dir, const std::string& id)
{
    const fs::path seq_dir = corpus_dir / id;
    if (!fs::exists(seq_dir / "image_ref.pgm") || !fs::exists(seq_dir / "regions.txt"))
        throw MissingCorpusError("sequence " + id + " has no stored source images");

    StoredSequence out;
    out.sequence.id = id;
    out.sequence.ref = read_pgm(seq_dir / "image_ref.pgm");
    for (int k = 0; k < 5; ++k)
        out.sequence.targets[k] =
            read_pgm(seq_dir / ("image_t" + std::to_string(k + 1) + ".pgm"));
    out.sequence.homographies = read_homographies(seq_dir / "homographies.txt");
    out.regions = read_regions(seq_dir / "regions.txt");
    return out;
}

// ---- results ---------------------------------------------------------------

double round_6sig(double v) { return std::strtod(format_6sig(v).c_str(), nullptr); }

std::string format_6sig(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

constexpr const char* kTaskOrder[] = {"verification", "matching", "retrieval"};

int task_rank(const std::string& task)
{
    for (int i = 0; i < 3; ++i)
        if (task == kTaskOrder[i])
            return i;
    return 3;
}

} // namespace

void summarize(ResultsReport& report)
{
    report.markers.clear();
    report.summary.clear();

    for (const auto& [descriptor, rows] : report.details) {
        // (task, variant, subvariant) -> APs, on the 6-digit grid the detail
        // CSVs store, so recomputation from files reproduces these numbers.
        std::map<std::string, std::map<std::pair<std::string, std::string>,
                                       std::vector<double>>>
            by_task;
        for (const DetailRow& row : rows)
            by_task[row.task][{row.variant, row.subvariant}].push_back(
                round_6sig(row.ap));

        for (const auto& [task, groups] : by_task) {
            double bar = 0.0;
            for (const auto& [key, aps] : groups) {
                double mean = 0.0;
                for (double a : aps)
                    mean += a;
                mean /= static_cast<double>(aps.size());
                mean = round_6sig(mean);
                report.markers.push_back({task, descriptor, key.first, key.second, mean});
                bar += mean;
            }
            bar /= static_cast<double>(groups.size());
            report.summary.push_back({task, descriptor, round_6sig(bar)});
        }
    }

    auto marker_key = [](const MarkerRow& m) {
        return std::tuple(task_rank(m.task), m.descriptor, m.variant, m.subvariant);
    };
    std::sort(report.markers.begin(), report.markers.end(),
              [&](const MarkerRow& a, const MarkerRow& b) {
                  return marker_key(a) < marker_key(b);
              });
    std::sort(report.summary.begin(), report.summary.end(),
              [](const SummaryRow& a, const SummaryRow& b) {
                  return std::tuple(task_rank(a.task), a.descriptor) <
                         std::tuple(task_rank(b.task), b.descriptor);
              });
}

void write_results(const ResultsReport& report, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create results directory: " + dir.string());

    for (const auto& [descriptor, rows] : report.details) {
        const fs::path desc_dir = dir / descriptor;
        fs::create_directories(desc_dir, ec);
        if (ec)
            throw IoError("cannot create descriptor directory: " + desc_dir.string());

        std::map<std::string, std::ofstream> files;
        for (const DetailRow& row : rows) {
            auto it = files.find(row.task);
            if (it == files.end()) {
                it = files.emplace(row.task, open_out(desc_dir / (row.task + ".csv")))
                         .first;
                it->second << "task,variant,subvariant,id,ap\n";
            }
            it->second << row.task << ',' << row.variant << ',' << row.subvariant << ','
                       << row.id << ',' << format_6sig(row.ap) << "\n";
        }
    }

    {
        std::ofstream out = open_out(dir / "summary.csv");
        out << "task,descriptor,mean_ap\n";
        for (const SummaryRow& row : report.summary)
            out << row.task << ',' << row.descriptor << ',' << format_6sig(row.mean_ap)
                << "\n";
    }
    {
        std::ofstream out = open_out(dir / "plotdata.csv");
        out << "task,descriptor,variant,subvariant,map\n";
        for (const MarkerRow& row : report.markers)
            out << row.task << ',' << row.descriptor << ',' << row.variant << ','
                << row.subvariant << ',' << format_6sig(row.map) << "\n";
    }
}

std::vector<std::pair<std::string, std::vector<DetailRow>>>
read_detail_results(const fs::path& dir)
{
    std::vector<std::pair<std::string, std::vector<DetailRow>>> out;
    std::vector<fs::path> desc_dirs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory())
            desc_dirs.push_back(entry.path());
    std::sort(desc_dirs.begin(), desc_dirs.end());

    for (const fs::path& desc_dir : desc_dirs) {
        std::vector<DetailRow> rows;
        for (const char* task : kTaskOrder) {
            const fs::path csv = desc_dir / (std::string(task) + ".csv");
            if (!fs::exists(csv))
                continue;
            std::ifstream in = open_in(csv);
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                DetailRow row;
                std::stringstream ss(line);
                std::string ap;
                std::getline(ss, row.task, ',');
                std::getline(ss, row.variant, ',');
                std::getline(ss, row.subvariant, ',');
                std::getline(ss, row.id, ',');
                std::getline(ss, ap, ',');
                row.ap = std::strtod(ap.c_str(), nullptr);
                rows.push_back(std::move(row));
            }
        }
        if (!rows.empty())
            out.emplace_back(desc_dir.filename().string(), std::move(rows));
    }
    return out;
}

// ---- descriptor and model serialization -------------------------------------

void write_descriptors_csv(const fs::path& path, const std::vector<std::string>& ids,
                           const Eigen::MatrixXd& values)
{
    if (static_cast<Eigen::Index>(ids.size()) != values.rows())
        throw std::invalid_argument("write_descriptors_csv: id count mismatch");
    std::ofstream out = open_out(path);
    out << "id";
    for (Eigen::Index d = 0; d < values.cols(); ++d)
        out << ",v" << d;
    out << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << ids[i];
        for (Eigen::Index d = 0; d < values.cols(); ++d) {
            std::snprintf(buf, sizeof(buf), "%.9g", values(i, d));
            out << ',' << buf;
        }
        out << "\n";
    }
}

void write_descriptors_bin(const fs::path& path, DescriptorFamily family,
                           const Eigen::MatrixXd& values,
                           const std::vector<BriefDescriptor>& bits)
{
    std::ofstream out = open_out(path);
    const bool binary = descriptor_is_binary(family);
    const std::size_t count = binary ? bits.size() : static_cast<std::size_t>(values.rows());
    out << descriptor_family_name(family) << " " << descriptor_dimension(family) << " "
        << count << "\n";

    if (binary) {
        for (const BriefDescriptor& d : bits)
            for (std::uint64_t word : d.bits)
                for (int b = 0; b < 8; ++b) {
                    const char byte = static_cast<char>((word >> (8 * b)) & 0xff);
                    out.write(&byte, 1);
                }
    } else {
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            for (Eigen::Index d = 0; d < values.cols(); ++d) {
                const float f = static_cast<float>(values(i, d));
                std::uint32_t word;
                std::memcpy(&word, &f, 4);
                for (int b = 0; b < 4; ++b) {
                    const char byte = static_cast<char>((word >> (8 * b)) & 0xff);
                    out.write(&byte, 1);
                }
            }
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

DescriptorBlock read_descriptors_bin(const fs::path& path)
{
    std::ifstream in = open_in(path);
    std::string family_name;
    int dim = 0;
    std::size_t count = 0;
    in >> family_name >> dim >> count;
    in.get(); // newline

    DescriptorBlock block;
    bool found = false;
    for (DescriptorFamily f : {DescriptorFamily::MStd, DescriptorFamily::Resz,
                               DescriptorFamily::Sift, DescriptorFamily::RootSift,
                               DescriptorFamily::Brief})
        if (family_name == descriptor_family_name(f)) {
            block.family = f;
            found = true;
        }
    if (!found || dim != descriptor_dimension(block.family))
        throw IoError("bad descriptor block header: " + path.string());

    auto read_bytes = [&](void* dst, std::size_t bytes) {
        in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (in.gcount() != static_cast<std::streamsize>(bytes))
            throw IoError("truncated descriptor block: " + path.string());
    };

    if (descriptor_is_binary(block.family)) {
        block.bits.resize(count);
        for (BriefDescriptor& d : block.bits)
            for (std::uint64_t& word : d.bits) {
                std::uint8_t raw[8];
                read_bytes(raw, 8);
                word = 0;
                for (int b = 0; b < 8; ++b)
                    word |= static_cast<std::uint64_t>(raw[b]) << (8 * b);
            }
    } else {
        block.values.resize(static_cast<Eigen::Index>(count), dim);
        for (Eigen::Index i = 0; i < block.values.rows(); ++i)
            for (int d = 0; d < dim; ++d) {
                std::uint8_t raw[4];
                read_bytes(raw, 4);
                std::uint32_t word = 0;
                for (int b = 0; b < 4; ++b)
                    word |= static_cast<std::uint32_t>(raw[b]) << (8 * b);
                float f;
                std::memcpy(&f, &word, 4);
                block.values(i, d) = f;
            }
    }
    return block;
}

void write_zca(const fs::path& path, const ZcaModel& model)
{
    std::ofstream out = open_out(path);
    char buf[40];
    out << "zca " << model.mean.size() << " ";
    std::snprintf(buf, sizeof(buf), "%.17g", model.alpha);
    out << buf << " ";
    std::snprintf(buf, sizeof(buf), "%.17g", model.clip_fraction);
    out << buf << "\n";

    auto write_row = [&](const double* data, Eigen::Index n) {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", data[i]);
            out << buf << (i + 1 == n ? "\n" : " ");
        }
    };
    write_row(model.mean.data(), model.mean.size());
    for (Eigen::Index r = 0; r < model.whitener.rows(); ++r) {
        Eigen::VectorXd row = model.whitener.row(r);
        write_row(row.data(), row.size());
    }
}

ZcaModel read_zca(const fs::path& path)
{
    std::ifstream in = open_in(path);
    std::string magic;
    Eigen::Index dim = 0;
    ZcaModel model;
    in >> magic >> dim >> model.alpha >> model.clip_fraction;
    if (magic != "zca" || dim <= 0)
        throw IoError("bad zca model header: " + path.string());
    model.mean.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        in >> model.mean(i);
    model.whitener.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
            in >> model.whitener(r, c);
    if (!in)
        throw IoError("truncated zca model: " + path.string());
    return model;
}

} // namespace patchbench

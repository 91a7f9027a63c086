#include <algorithm>
#include <random>

#include "gilp/tasks.hpp"

namespace gilp {

const char* to_string(Shape s) {
    switch (s) {
        case Shape::circle: return "circle";
        case Shape::square: return "square";
        case Shape::triangle: return "triangle";
    }
    return "?";
}

const char* to_string(Color c) {
    switch (c) {
        case Color::red: return "red";
        case Color::blue: return "blue";
        case Color::yellow: return "yellow";
    }
    return "?";
}

Shape parse_shape(const std::string& s) {
    if (s == "circle") return Shape::circle;
    if (s == "square") return Shape::square;
    if (s == "triangle") return Shape::triangle;
    throw DataError("unknown shape: " + s);
}

Color parse_color(const std::string& s) {
    if (s == "red") return Color::red;
    if (s == "blue") return Color::blue;
    if (s == "yellow") return Color::yellow;
    throw DataError("unknown color: " + s);
}

bool has_red(const KandinskyInstance& inst) {
    return std::any_of(inst.objects.begin(), inst.objects.end(),
                       [](const ObjectRecord& o) { return o.color == Color::red; });
}

bool has_triangle(const KandinskyInstance& inst) {
    return std::any_of(inst.objects.begin(), inst.objects.end(),
                       [](const ObjectRecord& o) { return o.shape == Shape::triangle; });
}

// Two disjoint pairs, each of one shape, one pair sharing a color and the
// other pair of two different colors.
bool is_two_pair(const KandinskyInstance& inst) {
    const auto& o = inst.objects;
    std::size_t n = o.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (o[a].shape != o[b].shape || o[a].color != o[b].color) continue;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    if (c == a || c == b || d == a || d == b) continue;
                    if (o[c].shape == o[d].shape && o[c].color != o[d].color) return true;
                }
        }
    return false;
}

bool kandinsky_label(const std::string& task, const KandinskyInstance& inst) {
    if (task == "kandinsky_one_red") return has_red(inst);
    if (task == "kandinsky_one_triangle") return has_triangle(inst);
    if (task == "kandinsky_two_pair") return is_two_pair(inst);
    throw ConfigError("unknown Kandinsky task: " + task);
}

namespace {

using Rng = std::mt19937_64;

ObjectRecord random_object(Rng& rng) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> jit(-0.05, 0.05);
    return {static_cast<Shape>(pick(rng)), static_cast<Color>(pick(rng)), {jit(rng), jit(rng)}};
}

ObjectRecord object(Rng& rng, Shape s, Color c) {
    auto o = random_object(rng);
    o.shape = s;
    o.color = c;
    return o;
}

KandinskyInstance single_feature(const std::string& task, bool label, Rng& rng) {
    std::uniform_int_distribution<int> count(2, 6);
    for (;;) {
        KandinskyInstance inst{label, {}};
        int n = count(rng);
        for (int i = 0; i < n; ++i) inst.objects.push_back(random_object(rng));
        if (kandinsky_label(task, inst) == label) return inst;
    }
}

KandinskyInstance two_pair_instance(bool label, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> kind(0, 2);
    for (;;) {
        KandinskyInstance inst{label, {}};
        auto s1 = static_cast<Shape>(pick(rng));
        auto s2 = static_cast<Shape>(pick(rng));
        auto c1 = static_cast<Color>(pick(rng));
        auto c2 = static_cast<Color>(pick(rng));
        auto c3 = static_cast<Color>(pick(rng));
        if (label) {
            if (c2 == c3) continue;
            inst.objects = {object(rng, s1, c1), object(rng, s1, c1), object(rng, s2, c2), object(rng, s2, c3)};
        } else {
            switch (kind(rng)) {
                case 0:  // two same-color pairs
                    inst.objects = {object(rng, s1, c1), object(rng, s1, c1), object(rng, s2, c2),
                                    object(rng, s2, c2)};
                    break;
                case 1:  // two different-color pairs
                    inst.objects = {object(rng, s1, c1), object(rng, s1, c2), object(rng, s2, c2),
                                    object(rng, s2, c3)};
                    break;
                default:
                    for (int i = 0; i < 4; ++i) inst.objects.push_back(random_object(rng));
            }
        }
        if (is_two_pair(inst) != label) continue;
        std::shuffle(inst.objects.begin(), inst.objects.end(), rng);
        return inst;
    }
}

}  // namespace

KandinskyTask gen_kandinsky_task(const TaskSpec& spec) {
    if (!is_kandinsky_task(spec.name)) throw ConfigError("unknown Kandinsky task: " + spec.name);
    if (spec.train_instances < 2 || spec.test_instances < 1) throw ConfigError("too few Kandinsky instances");
    Rng rng(mix_seed(spec.seed, 0x6b616e64));
    KandinskyTask task;
    task.name = spec.name;
    auto draw = [&](int count, std::vector<KandinskyInstance>& out) {
        for (int i = 0; i < count; ++i) {
            bool label = i % 2 == 0;
            out.push_back(spec.name == "kandinsky_two_pair" ? two_pair_instance(label, rng)
                                                  : single_feature(spec.name, label, rng));
        }
    };
    draw(spec.train_instances, task.train);
    draw(spec.test_instances, task.test);
    return task;
}

std::vector<double> encode_object(const ObjectRecord& obj, const FeatureEncoder& enc, std::uint64_t seed) {
    if (enc.dim < 8) throw ConfigError("object encoder needs at least 8 dimensions");
    std::vector<double> v(static_cast<std::size_t>(enc.dim), 0.0);
    v[static_cast<std::size_t>(obj.shape)] = 1.0;
    v[3 + static_cast<std::size_t>(obj.color)] = 1.0;
    v[6] = obj.jitter[0];
    v[7] = obj.jitter[1];
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (auto& x : v) x = x * enc.scale + enc.noise_scale * noise(rng);
    return v;
}

std::vector<double> encode_digit(int label, double noise_scale, std::uint64_t seed, int dim) {
    if (label < 0 || label > 9) throw DataError("digit label out of range");
    std::vector<double> v(static_cast<std::size_t>(std::max(10, dim)), 0.0);
    v[static_cast<std::size_t>(label)] = 1.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (auto& x : v) x += noise_scale * noise(rng);
    return v;
}

}  // namespace gilp

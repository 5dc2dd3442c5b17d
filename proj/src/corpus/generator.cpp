#include "codescope/corpus/generator.hpp"

#include <array>
#include <functional>
#include <set>
#include <sstream>

namespace codescope::corpus {

using props::TokenClass;

std::string content_hash(const std::string& code, const std::string& doc) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  mix(code);
  mix(doc);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

/// Emits MiniPy source token by token, recording the ground-truth class of
/// every emitted token. This record is independent of the lexer and serves
/// as the oracle for lexical labels.
class TokenWriter {
 public:
  void kw(const std::string& t) { emit(t, TokenClass::Keyword); }
  void id(const std::string& t) { emit(t, TokenClass::Identifier); }
  void op(const std::string& t) { emit(t, TokenClass::Operator); }
  void num(long v) { emit(std::to_string(v), TokenClass::Number); }
  void str(const std::string& raw) { emit("\"" + raw + "\"", TokenClass::String); }

  void newline() {
    out_ += "\n";
    line_start_ = true;
    prev_.clear();
  }
  void push() { ++indent_; }
  void pop() { --indent_; }

  void predicate() { ++predicates_; }
  int complexity() const { return predicates_ + 1; }

  const std::string& source() const { return out_; }
  const std::vector<std::pair<std::string, TokenClass>>& labels() const {
    return labels_;
  }

 private:
  std::string out_;
  std::vector<std::pair<std::string, TokenClass>> labels_;
  int indent_ = 0;
  int predicates_ = 0;
  bool line_start_ = true;
  std::string prev_;
  TokenClass prev_cls_ = TokenClass::Operator;

  void emit(const std::string& t, TokenClass cls) {
    if (line_start_) {
      for (int i = 0; i < indent_; ++i) out_ += "    ";
      line_start_ = false;
    } else if (need_space(t, cls)) {
      out_ += " ";
    }
    out_ += t;
    labels_.emplace_back(t, cls);
    prev_ = t;
    prev_cls_ = cls;
  }

  bool need_space(const std::string& t, TokenClass cls) const {
    if (t == "," || t == ":" || t == ")") return false;
    if (prev_ == "(") return false;
    if (t == "(")
      return !(prev_cls_ == TokenClass::Identifier);  // call syntax f(
    (void)cls;
    return true;
  }
};

class NamePool {
 public:
  explicit NamePool(nc::Rng& rng) : rng_(rng) {}

  std::string fresh() {
    static const std::array<const char*, 40> bases = {
        "total", "count",  "value", "result", "acc",   "numv",  "item",
        "tmp",   "datum",  "leftv", "rightv", "low",   "high",  "size",
        "index", "flag",   "score", "level",  "depth", "width", "stepv",
        "delta", "limit",  "basev", "rate",   "mass",  "span",  "keyv",
        "valx",  "nodev",  "edgev", "cur",    "prevv", "nextv", "best",
        "worst", "firstv", "lastv", "mid",    "probe"};
    for (;;) {
      std::string name(bases[static_cast<size_t>(rng_.uniform_int(bases.size()))]);
      int64_t suffix = rng_.uniform_int(10);
      if (suffix > 0) name += std::to_string(suffix);
      if (used_.insert(name).second) return name;
    }
  }

  std::string fresh_fn() {
    static const std::array<const char*, 10> bases = {
        "calc", "compute", "process", "evalfn", "measure",
        "solve", "check",   "build",   "scanfn", "reduce"};
    std::string name(bases[static_cast<size_t>(rng_.uniform_int(bases.size()))]);
    int64_t suffix = rng_.uniform_int(100);
    if (suffix > 0) name += std::to_string(suffix);
    return name;
  }

 private:
  nc::Rng& rng_;
  std::set<std::string> used_;
};

struct Consts {
  std::vector<long> nums;
};

struct Template {
  const char* tag;
  std::vector<const char*> docs;
  std::function<Consts(nc::Rng&)> draw;
  // emit the function body; `var` controls names/forms only
  std::function<void(TokenWriter&, const Consts&, nc::Rng&, NamePool&)> emit;
};

long small(nc::Rng& r) { return 2 + r.uniform_int(8); }

// helpers for common fragments
void assign_num(TokenWriter& w, const std::string& name, long v) {
  w.id(name); w.op("="); w.num(v); w.newline();
}

void fn_header(TokenWriter& w, const std::string& fname,
               const std::vector<std::string>& params) {
  w.kw("def");
  w.id(fname);
  w.op("(");
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) w.op(",");
    w.id(params[i]);
  }
  w.op(")");
  w.op(":");
  w.newline();
  w.push();
}

const std::vector<Template>& templates() {
  static const std::vector<Template> tpl = [] {
    std::vector<Template> v;

    v.push_back({"affine",
                 {"scale the input by #1 and add #2",
                  "apply a linear transform with slope #1 and intercept #2"},
                 [](nc::Rng& r) { return Consts{{small(r), small(r)}}; },
                 [](TokenWriter& w, const Consts& c, nc::Rng&, NamePool& np) {
                   std::string x = np.fresh(), y = np.fresh();
                   fn_header(w, np.fresh_fn(), {x});
                   w.id(y); w.op("="); w.num(c.nums[0]); w.op("*"); w.id(x);
                   w.op("+"); w.num(c.nums[1]); w.newline();
                   w.kw("return"); w.id(y); w.newline();
                   w.pop();
                 }});

    v.push_back({"combine3",
                 {"combine three inputs weighting the third by #1",
                  "mix three values with weight #1 on the last"},
                 [](nc::Rng& r) { return Consts{{small(r)}}; },
                 [](TokenWriter& w, const Consts& c, nc::Rng& var, NamePool& np) {
                   std::string a = np.fresh(), b = np.fresh(), d = np.fresh();
                   std::string u = np.fresh(), t = np.fresh(), s = np.fresh();
                   fn_header(w, np.fresh_fn(), {a, b, d});
                   // u and t are independent; order is a free variant choice
                   auto emit_u = [&] {
                     w.id(u); w.op("="); w.id(a); w.op("+"); w.id(b); w.newline();
                   };
                   auto emit_t = [&] {
                     w.id(t); w.op("="); w.id(d); w.op("*"); w.num(c.nums[0]);
                     w.newline();
                   };
                   if (var.uniform_int(2) == 0) { emit_u(); emit_t(); }
                   else { emit_t(); emit_u(); }
                   w.id(s); w.op("="); w.id(u); w.op("+"); w.id(t); w.newline();
                   w.kw("return"); w.id(s); w.newline();
                   w.pop();
                 }});

    v.push_back({"absdiff",
                 {"return the absolute difference of two numbers",
                  "compute how far apart two values are"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [](TokenWriter& w, const Consts&, nc::Rng&, NamePool& np) {
                   std::string x = np.fresh(), y = np.fresh(), d = np.fresh();
                   fn_header(w, np.fresh_fn(), {x, y});
                   w.kw("if"); w.predicate();
                   w.id(x); w.op(">"); w.id(y); w.op(":"); w.newline(); w.push();
                   w.id(d); w.op("="); w.id(x); w.op("-"); w.id(y); w.newline();
                   w.pop();
                   w.kw("else"); w.op(":"); w.newline(); w.push();
                   w.id(d); w.op("="); w.id(y); w.op("-"); w.id(x); w.newline();
                   w.pop();
                   w.kw("return"); w.id(d); w.newline();
                   w.pop();
                 }});

    v.push_back({"sign_label",
                 {"label a number as positive negative or zero",
                  "classify the sign of the input value"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [](TokenWriter& w, const Consts&, nc::Rng&, NamePool& np) {
                   std::string x = np.fresh();
                   fn_header(w, np.fresh_fn(), {x});
                   w.kw("if"); w.predicate();
                   w.id(x); w.op(">"); w.num(0); w.op(":"); w.newline(); w.push();
                   w.kw("return"); w.str("positive"); w.newline(); w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(x); w.op("<"); w.num(0); w.op(":"); w.newline(); w.push();
                   w.kw("return"); w.str("negative"); w.newline(); w.pop();
                   w.kw("else"); w.op(":"); w.newline(); w.push();
                   w.kw("return"); w.str("zero"); w.newline(); w.pop();
                   w.pop();
                 }});

    v.push_back({"clamp",
                 {"clamp a value into the interval #1 to #2",
                  "restrict the input between #1 and #2"},
                 [](nc::Rng& r) {
                   long lo = small(r);
                   return Consts{{lo, lo + small(r)}};
                 },
                 [](TokenWriter& w, const Consts& c, nc::Rng&, NamePool& np) {
                   std::string x = np.fresh();
                   fn_header(w, np.fresh_fn(), {x});
                   w.kw("if"); w.predicate();
                   w.id(x); w.op("<"); w.num(c.nums[0]); w.op(":"); w.newline();
                   w.push();
                   assign_num(w, x, c.nums[0]);
                   w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(x); w.op(">"); w.num(c.nums[1]); w.op(":"); w.newline();
                   w.push();
                   assign_num(w, x, c.nums[1]);
                   w.pop();
                   w.kw("return"); w.id(x); w.newline();
                   w.pop();
                 }});

    // loop over a range, accumulating; for/while form is a variant choice
    auto loop_accum = [](TokenWriter& w, nc::Rng& var, NamePool& np,
                         const std::string& n, const std::string& acc,
                         const std::function<void(const std::string&)>& body) {
      std::string i = np.fresh();
      if (var.uniform_int(2) == 0) {
        w.kw("for"); w.predicate();
        w.id(i); w.kw("in"); w.id("range"); w.op("(");
        w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":"); w.newline(); w.push();
        body(i);
        w.pop();
      } else {
        assign_num(w, i, 0);
        w.kw("while"); w.predicate();
        w.id(i); w.op("<"); w.id(n); w.op(":"); w.newline(); w.push();
        body(i);
        w.id(i); w.op("="); w.id(i); w.op("+"); w.num(1); w.newline();
        w.pop();
      }
      (void)acc;
    };

    v.push_back({"sum_range",
                 {"sum the integers below the given limit",
                  "add up all numbers from zero to the limit"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [loop_accum](TokenWriter& w, const Consts&, nc::Rng& var,
                              NamePool& np) {
                   std::string n = np.fresh(), s = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, s, 0);
                   loop_accum(w, var, np, n, s, [&](const std::string& i) {
                     w.id(s); w.op("="); w.id(s); w.op("+"); w.id(i); w.newline();
                   });
                   w.kw("return"); w.id(s); w.newline();
                   w.pop();
                 }});

    v.push_back({"product_range",
                 {"multiply the shifted numbers offset by #1 up to the limit",
                  "compute a running product with offset #1 over the range"},
                 [](nc::Rng& r) { return Consts{{small(r)}}; },
                 [loop_accum](TokenWriter& w, const Consts& c, nc::Rng& var,
                              NamePool& np) {
                   std::string n = np.fresh(), p = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, p, 1);
                   loop_accum(w, var, np, n, p, [&](const std::string& i) {
                     w.id(p); w.op("="); w.id(p); w.op("*"); w.op("(");
                     w.id(i); w.op("+"); w.num(c.nums[0]); w.op(")"); w.newline();
                   });
                   w.kw("return"); w.id(p); w.newline();
                   w.pop();
                 }});

    v.push_back({"count_multiples",
                 {"count how many numbers below the limit divide by #1",
                  "count the multiples of #1 in the range"},
                 [](nc::Rng& r) { return Consts{{small(r)}}; },
                 [loop_accum](TokenWriter& w, const Consts& c, nc::Rng& var,
                              NamePool& np) {
                   std::string n = np.fresh(), cnt = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, cnt, 0);
                   loop_accum(w, var, np, n, cnt, [&](const std::string& i) {
                     w.kw("if"); w.predicate();
                     w.id(i); w.op("%"); w.num(c.nums[0]); w.op("=="); w.num(0);
                     w.op(":"); w.newline(); w.push();
                     w.id(cnt); w.op("="); w.id(cnt); w.op("+"); w.num(1);
                     w.newline(); w.pop();
                   });
                   w.kw("return"); w.id(cnt); w.newline();
                   w.pop();
                 }});

    v.push_back({"sum_even_odd",
                 {"sum even and odd numbers separately weighting odds by #1",
                  "split the range into even and odd sums scaled by #1"},
                 [](nc::Rng& r) { return Consts{{small(r)}}; },
                 [loop_accum](TokenWriter& w, const Consts& c, nc::Rng& var,
                              NamePool& np) {
                   std::string n = np.fresh(), ev = np.fresh(), od = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   if (var.uniform_int(2) == 0) {
                     assign_num(w, ev, 0);
                     assign_num(w, od, 0);
                   } else {
                     assign_num(w, od, 0);
                     assign_num(w, ev, 0);
                   }
                   loop_accum(w, var, np, n, ev, [&](const std::string& i) {
                     w.kw("if"); w.predicate();
                     w.id(i); w.op("%"); w.num(2); w.op("=="); w.num(0);
                     w.op(":"); w.newline(); w.push();
                     w.id(ev); w.op("="); w.id(ev); w.op("+"); w.id(i);
                     w.newline(); w.pop();
                     w.kw("else"); w.op(":"); w.newline(); w.push();
                     w.id(od); w.op("="); w.id(od); w.op("+"); w.id(i);
                     w.newline(); w.pop();
                   });
                   w.kw("return"); w.id(ev); w.op("+"); w.id(od); w.op("*");
                   w.num(c.nums[0]); w.newline();
                   w.pop();
                 }});

    v.push_back({"max3",
                 {"return the largest of three values",
                  "find the maximum among three inputs"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [](TokenWriter& w, const Consts&, nc::Rng&, NamePool& np) {
                   std::string a = np.fresh(), b = np.fresh(), cc = np.fresh();
                   std::string t = np.fresh();
                   fn_header(w, np.fresh_fn(), {a, b, cc});
                   w.id(t); w.op("="); w.id(a); w.newline();
                   w.kw("if"); w.predicate();
                   w.id(b); w.op(">"); w.id(t); w.op(":"); w.newline(); w.push();
                   w.id(t); w.op("="); w.id(b); w.newline(); w.pop();
                   w.kw("if"); w.predicate();
                   w.id(cc); w.op(">"); w.id(t); w.op(":"); w.newline(); w.push();
                   w.id(t); w.op("="); w.id(cc); w.newline(); w.pop();
                   w.kw("return"); w.id(t); w.newline();
                   w.pop();
                 }});

    v.push_back({"halving_steps",
                 {"count halving steps until the value reaches zero",
                  "repeatedly shrink the value and count the iterations"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [](TokenWriter& w, const Consts&, nc::Rng&, NamePool& np) {
                   std::string n = np.fresh(), cnt = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, cnt, 0);
                   w.kw("while"); w.predicate();
                   w.id(n); w.op(">"); w.num(0); w.op(":"); w.newline(); w.push();
                   w.kw("if"); w.predicate();
                   w.id(n); w.op("%"); w.num(2); w.op("=="); w.num(0); w.op(":");
                   w.newline(); w.push();
                   w.id(n); w.op("="); w.id(n); w.op("//"); w.num(2); w.newline();
                   w.pop();
                   w.kw("else"); w.op(":"); w.newline(); w.push();
                   w.id(n); w.op("="); w.id(n); w.op("-"); w.num(1); w.newline();
                   w.pop();
                   w.id(cnt); w.op("="); w.id(cnt); w.op("+"); w.num(1);
                   w.newline(); w.pop();
                   w.kw("return"); w.id(cnt); w.newline();
                   w.pop();
                 }});

    v.push_back({"grade",
                 {"map a score to a grade band with top cut #1",
                  "bucket the score into grade levels from #3 up"},
                 [](nc::Rng& r) {
                   long a = 50 + small(r) * 3;
                   return Consts{{a + 20, a + 10, a}};
                 },
                 [](TokenWriter& w, const Consts& c, nc::Rng&, NamePool& np) {
                   std::string s = np.fresh();
                   fn_header(w, np.fresh_fn(), {s});
                   w.kw("if"); w.predicate();
                   w.id(s); w.op(">="); w.num(c.nums[0]); w.op(":"); w.newline();
                   w.push(); w.kw("return"); w.str("high"); w.newline(); w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(s); w.op(">="); w.num(c.nums[1]); w.op(":"); w.newline();
                   w.push(); w.kw("return"); w.str("middle"); w.newline(); w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(s); w.op(">="); w.num(c.nums[2]); w.op(":"); w.newline();
                   w.push(); w.kw("return"); w.str("low"); w.newline(); w.pop();
                   w.kw("else"); w.op(":"); w.newline(); w.push();
                   w.kw("return"); w.str("fail"); w.newline(); w.pop();
                   w.pop();
                 }});

    v.push_back({"nested_sum",
                 {"sum all products over a square grid of indices",
                  "accumulate products across two nested index ranges"},
                 [](nc::Rng&) { return Consts{{}}; },
                 [](TokenWriter& w, const Consts&, nc::Rng&, NamePool& np) {
                   std::string n = np.fresh(), s = np.fresh();
                   std::string i = np.fresh(), j = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, s, 0);
                   w.kw("for"); w.predicate();
                   w.id(i); w.kw("in"); w.id("range"); w.op("(");
                   w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":");
                   w.newline(); w.push();
                   w.kw("for"); w.predicate();
                   w.id(j); w.kw("in"); w.id("range"); w.op("(");
                   w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":");
                   w.newline(); w.push();
                   w.id(s); w.op("="); w.id(s); w.op("+"); w.id(i); w.op("*");
                   w.id(j); w.newline();
                   w.pop(); w.pop();
                   w.kw("return"); w.id(s); w.newline();
                   w.pop();
                 }});

    v.push_back({"bucket_count",
                 {"tally remainder buckets weighted #1 and #2",
                  "count residues modulo three with weights #1 and #2"},
                 [](nc::Rng& r) { return Consts{{small(r), small(r)}}; },
                 [](TokenWriter& w, const Consts& c, nc::Rng&, NamePool& np) {
                   std::string n = np.fresh(), a = np.fresh(), b = np.fresh(),
                               d = np.fresh(), i = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, a, 0);
                   assign_num(w, b, 0);
                   assign_num(w, d, 0);
                   w.kw("for"); w.predicate();
                   w.id(i); w.kw("in"); w.id("range"); w.op("(");
                   w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":");
                   w.newline(); w.push();
                   w.kw("if"); w.predicate();
                   w.id(i); w.op("%"); w.num(3); w.op("=="); w.num(0); w.op(":");
                   w.newline(); w.push();
                   w.id(a); w.op("="); w.id(a); w.op("+"); w.num(1); w.newline();
                   w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(i); w.op("%"); w.num(3); w.op("=="); w.num(1); w.op(":");
                   w.newline(); w.push();
                   w.id(b); w.op("="); w.id(b); w.op("+"); w.num(1); w.newline();
                   w.pop();
                   w.kw("else"); w.op(":"); w.newline(); w.push();
                   w.id(d); w.op("="); w.id(d); w.op("+"); w.num(1); w.newline();
                   w.pop(); w.pop();
                   w.kw("return"); w.id(a); w.op("*"); w.num(c.nums[0]);
                   w.op("+"); w.id(b); w.op("*"); w.num(c.nums[1]); w.op("+");
                   w.id(d); w.newline();
                   w.pop();
                 }});

    v.push_back({"deep_scan",
                 {"scan a grid with thresholds #1 and #2",
                  "count grid cells against bands #1 and #2"},
                 [](nc::Rng& r) { return Consts{{small(r), small(r)}}; },
                 [](TokenWriter& w, const Consts& c, nc::Rng&, NamePool& np) {
                   std::string n = np.fresh(), hits = np.fresh(),
                               miss = np.fresh(), i = np.fresh(), j = np.fresh();
                   fn_header(w, np.fresh_fn(), {n});
                   assign_num(w, hits, 0);
                   assign_num(w, miss, 0);
                   w.kw("for"); w.predicate();
                   w.id(i); w.kw("in"); w.id("range"); w.op("(");
                   w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":");
                   w.newline(); w.push();
                   w.kw("for"); w.predicate();
                   w.id(j); w.kw("in"); w.id("range"); w.op("(");
                   w.num(0); w.op(","); w.id(n); w.op(")"); w.op(":");
                   w.newline(); w.push();
                   w.kw("if"); w.predicate();
                   w.id(i); w.op("+"); w.id(j); w.op(">"); w.num(c.nums[0]);
                   w.op(":"); w.newline(); w.push();
                   w.id(hits); w.op("="); w.id(hits); w.op("+"); w.num(1);
                   w.newline(); w.pop();
                   w.kw("elif"); w.predicate();
                   w.id(i); w.op("*"); w.id(j); w.op(">"); w.num(c.nums[1]);
                   w.op(":"); w.newline(); w.push();
                   w.id(miss); w.op("="); w.id(miss); w.op("+"); w.num(1);
                   w.newline(); w.pop(); w.pop(); w.pop();
                   w.kw("return"); w.id(hits); w.op("-"); w.id(miss); w.newline();
                   w.pop();
                 }});

    return v;
  }();
  return tpl;
}

// "#k" placeholders take the k-th drawn constant, so descriptions identify
// the concrete problem instance, not just the template family.
std::string subst_consts(const std::string& tpl, const Consts& c) {
  std::string out;
  for (size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '#' && i + 1 < tpl.size() && tpl[i + 1] >= '1' &&
        tpl[i + 1] <= '9') {
      size_t k = static_cast<size_t>(tpl[i + 1] - '1');
      out += k < c.nums.size() ? std::to_string(c.nums[k]) : "?";
      ++i;
    } else {
      out += tpl[i];
    }
  }
  return out;
}

EmittedProgram render(size_t tpl_idx, const Consts& consts, nc::Rng& var) {
  const Template& t = templates()[tpl_idx];
  TokenWriter w;
  NamePool np(var);
  t.emit(w, consts, var, np);
  EmittedProgram p;
  p.code = w.source();
  p.tag = t.tag;
  p.complexity = w.complexity();
  p.emission_labels = w.labels();
  std::string phrase = t.docs[static_cast<size_t>(var.uniform_int(
      static_cast<int64_t>(t.docs.size())))];
  // labels[0] is "def"; labels[1] is the function name
  p.doc = subst_consts(phrase, consts) + " in " + p.emission_labels[1].first;
  return p;
}

}  // namespace

int template_count() { return static_cast<int>(templates().size()); }

EmittedProgram generate_program(nc::Rng& rng) {
  size_t idx = static_cast<size_t>(
      rng.uniform_int(static_cast<int64_t>(templates().size())));
  Consts c = templates()[idx].draw(rng);
  return render(idx, c, rng);
}

std::vector<CorpusRecord> generate_toy_corpus(uint64_t seed, int size) {
  nc::Rng rng(seed);
  std::vector<CorpusRecord> out;
  out.reserve(static_cast<size_t>(size));
  for (int k = 0; k < size; ++k) {
    EmittedProgram p = generate_program(rng);
    CorpusRecord r;
    r.code = p.code;
    r.doc = p.doc;
    r.tag = p.tag;
    r.complexity = p.complexity;
    r.id = content_hash(r.code, r.doc);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<CorpusRecord>> generate_semantic_clusters(int problems,
                                                                 int variants,
                                                                 uint64_t seed) {
  nc::Rng seeder(seed);
  std::vector<std::vector<CorpusRecord>> clusters;
  for (int p = 0; p < problems; ++p) {
    size_t idx = static_cast<size_t>(p) % templates().size();
    nc::Rng const_rng(seeder.next_u64());
    Consts c = templates()[idx].draw(const_rng);
    std::vector<CorpusRecord> cluster;
    std::set<std::string> seen;
    int attempts = 0;
    while (static_cast<int>(cluster.size()) < variants && attempts < variants * 50) {
      nc::Rng var_rng(seeder.next_u64());
      EmittedProgram prog = render(idx, c, var_rng);
      ++attempts;
      if (!seen.insert(prog.code).second) continue;  // duplicate surface form
      CorpusRecord r;
      r.code = prog.code;
      r.doc = prog.doc;
      r.tag = prog.tag;
      r.complexity = prog.complexity;
      r.id = content_hash(r.code, r.doc);
      cluster.push_back(std::move(r));
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace codescope::corpus

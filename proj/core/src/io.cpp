#include "sdfp/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdfp/linalg.hpp"

namespace sdfp::io {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

namespace {

struct Token {
  std::string s;
  int line = 0;
  int col = 0;
};

class Tokenizer {
public:
  explicit Tokenizer(const std::string& text) {
    int line = 1, col = 1;
    size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '#') {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      if (c == '\n') {
        ++line;
        col = 1;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col;
        ++i;
        continue;
      }
      Token t;
      t.line = line;
      t.col = col;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             text[i] != '#') {
        t.s.push_back(text[i]);
        ++i;
        ++col;
      }
      tokens_.push_back(std::move(t));
    }
    end_line_ = line;
  }

  bool eof() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (eof()) throw ParseError("unexpected end of input", end_line_, 1);
    return tokens_[pos_];
  }

  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }

  void expect_exact(const std::string& word) {
    const Token t = next();
    if (t.s != word)
      throw ParseError("expected '" + word + "', found '" + t.s + "'", t.line, t.col);
  }

  long expect_int(const char* what) {
    const Token t = next();
    try {
      size_t used = 0;
      const long v = std::stol(t.s, &used);
      if (used != t.s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ParseError(std::string("expected integer ") + what + ", found '" + t.s + "'", t.line,
                       t.col);
    }
  }

  double expect_real(const char* what) {
    const Token t = next();
    try {
      size_t used = 0;
      const double v = std::stod(t.s, &used);
      if (used != t.s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ParseError(std::string("expected number ") + what + ", found '" + t.s + "'", t.line,
                       t.col);
    }
  }

private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  int end_line_ = 1;
};

SymMatrix read_sym(Tokenizer& tok, int n) {
  std::vector<double> upper(tri_size(n));
  for (auto& v : upper) v = tok.expect_real("matrix entry");
  return SymMatrix(n, std::move(upper));
}

Matrix read_full(Tokenizer& tok, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = tok.expect_real("matrix entry");
  return m;
}

void write_sym(std::ostringstream& out, const SymMatrix& s) {
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = i; j < s.dim(); ++j) out << (j > i ? " " : "") << format_real(s(i, j));
    out << "\n";
  }
}

void write_full(std::ostringstream& out, const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out << (j > 0 ? " " : "") << format_real(m(i, j));
    out << "\n";
  }
}

Problem parse_problem_body(Tokenizer& tok, const Tolerances& tol) {
  tok.expect_exact("n");
  const Token where = tok.peek();
  const int n = static_cast<int>(tok.expect_int("dimension"));
  if (n < 1) throw ParseError("dimension must be >= 1", where.line, where.col);

  tok.expect_exact("form");
  const Token form = tok.next();
  if (form.s == "span") {
    tok.expect_exact("c");
    const SymMatrix c = read_sym(tok, n);
    tok.expect_exact("basis");
    const int d = static_cast<int>(tok.expect_int("basis count"));
    if (d < 0 || d > tri_size(n))
      throw ParseError("basis count out of range", form.line, form.col);
    std::vector<SymMatrix> basis;
    basis.reserve(d);
    for (int i = 0; i < d; ++i) {
      tok.expect_exact("mat");
      basis.push_back(read_sym(tok, n));
    }
    return Problem{AffineSubspace::make(n, basis, c)};
  }
  if (form.s == "equations") {
    tok.expect_exact("equations");
    const int m = static_cast<int>(tok.expect_int("equation count"));
    if (m < 0) throw ParseError("equation count out of range", form.line, form.col);
    std::vector<SymMatrix> lhs;
    std::vector<double> rhs;
    for (int i = 0; i < m; ++i) {
      tok.expect_exact("eq");
      lhs.push_back(read_sym(tok, n));
      tok.expect_exact("rhs");
      rhs.push_back(tok.expect_real("right-hand side"));
    }
    // Solution set of <A_i, x> = b_i converted to (basis, anchor):
    // particular solution + nullspace under the svec coordinates.
    Matrix a(m, tri_size(n));
    for (int i = 0; i < m; ++i) {
      const auto v = lhs[i].svec();
      for (int j = 0; j < tri_size(n); ++j) a(i, j) = v[j];
    }
    const auto ls = least_squares(a, rhs, tol.rank, /*with_nullspace=*/true);
    double bscale = 1.0;
    for (double b : rhs) bscale = std::max(bscale, std::fabs(b));
    if (ls.residual > tol.lin * bscale)
      throw Error("equation system is inconsistent: no affine set exists");
    const SymMatrix anchor = SymMatrix::from_svec(n, ls.solution);
    std::vector<SymMatrix> basis;
    for (const auto& nv : ls.nullspace) basis.push_back(SymMatrix::from_svec(n, nv));
    return Problem{AffineSubspace::make(n, basis, anchor)};
  }
  throw ParseError("form must be 'span' or 'equations', found '" + form.s + "'", form.line,
                   form.col);
}

void write_problem_body(std::ostringstream& out, const Problem& p) {
  out << "n " << p.n() << "\n";
  out << "form span\n";
  out << "c\n";
  write_sym(out, p.space.anchor);
  out << "basis " << p.space.dim() << "\n";
  for (const auto& b : p.space.basis) {
    out << "mat\n";
    write_sym(out, b);
  }
}

FPOutput parse_fp(Tokenizer& tok) {
  tok.expect_exact("fp");
  tok.expect_exact("n");
  const int n = static_cast<int>(tok.expect_int("partition ambient dimension"));
  tok.expect_exact("m");
  const int m = static_cast<int>(tok.expect_int("partition size"));
  FPOutput fp;
  tok.expect_exact("ks");
  fp.ks.resize(m);
  for (auto& k : fp.ks) k = static_cast<int>(tok.expect_int("block size"));
  tok.expect_exact("last_n");
  const int last_n = static_cast<int>(tok.expect_int("last dimension"));
  tok.expect_exact("P");
  fp.P = read_full(tok, n, n);
  for (int i = 0; i < m; ++i) {
    tok.expect_exact("A");
    fp.partition.push_back(read_sym(tok, n));
  }
  tok.expect_exact("separator");
  const int has_sep = static_cast<int>(tok.expect_int("separator flag"));
  if (has_sep) fp.separator = read_sym(tok, last_n);
  fp.last = Problem{AffineSubspace{last_n, {}, SymMatrix(last_n)}};
  return fp;
}

void write_fp(std::ostringstream& out, const FPOutput& fp, int n) {
  out << "fp\n";
  out << "n " << n << "\n";
  out << "m " << fp.m() << "\n";
  out << "ks";
  for (int k : fp.ks) out << " " << k;
  if (fp.ks.empty()) out << " ";
  out << "\n";
  out << "last_n " << (n - fp.total_k()) << "\n";
  out << "P\n";
  write_full(out, fp.P);
  for (const auto& a : fp.partition) {
    out << "A\n";
    write_sym(out, a);
  }
  out << "separator " << (fp.separator ? 1 : 0) << "\n";
  if (fp.separator) write_sym(out, *fp.separator);
}

const char* status_token(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::StronglyFeasible: return "strongly_feasible";
    case FeasibilityStatus::WeaklyFeasible: return "weakly_feasible";
    case FeasibilityStatus::WeaklyInfeasible: return "weakly_infeasible";
    case FeasibilityStatus::StronglyInfeasible: return "strongly_infeasible";
  }
  return "?";
}

ChainRound parse_round(Tokenizer& tok) {
  ChainRound round;
  tok.expect_exact("round");
  tok.expect_exact("problem");
  round.problem = parse_problem_body(tok, Tolerances{});
  const int n = round.problem.n();
  round.fp = parse_fp(tok);
  const int last_n = n - round.fp.total_k();

  tok.expect_exact("verdict");
  const Token verdict = tok.next();
  const auto st = status_from_string(verdict.s);
  if (!st) throw ParseError("unknown verdict '" + verdict.s + "'", verdict.line, verdict.col);
  round.last_status = *st;

  tok.expect_exact("last_wf");
  if (tok.expect_int("flag")) {
    tok.expect_exact("x");
    const SymMatrix x = read_sym(tok, last_n);
    tok.expect_exact("y");
    round.last_wf = WeakFeasCert{x, read_sym(tok, last_n)};
  }
  tok.expect_exact("last_sf");
  if (tok.expect_int("flag")) {
    tok.expect_exact("x");
    round.last_sf = StrongFeasCert{read_sym(tok, last_n)};
  }
  tok.expect_exact("last_si");
  if (tok.expect_int("flag")) {
    tok.expect_exact("s");
    round.last_si = StrongInfeasCert{read_sym(tok, last_n)};
  }
  tok.expect_exact("reduction");
  if (tok.expect_int("flag")) {
    FaceReduction red;
    tok.expect_exact("k");
    red.k = static_cast<int>(tok.expect_int("reduction split"));
    tok.expect_exact("l");
    red.l = static_cast<int>(tok.expect_int("face size"));
    tok.expect_exact("slice_empty");
    red.slice_empty = tok.expect_int("flag") != 0;
    tok.expect_exact("w");
    red.w = read_sym(tok, n - red.k);
    tok.expect_exact("M");
    red.normalizer = read_full(tok, n, n);
    round.reduction = std::move(red);
  }
  return round;
}

void write_round(std::ostringstream& out, const ChainRound& round) {
  out << "round\n";
  out << "problem\n";
  write_problem_body(out, round.problem);
  write_fp(out, round.fp, round.problem.n());
  out << "verdict " << status_token(round.last_status) << "\n";
  out << "last_wf " << (round.last_wf ? 1 : 0) << "\n";
  if (round.last_wf) {
    out << "x\n";
    write_sym(out, round.last_wf->x);
    out << "y\n";
    write_sym(out, round.last_wf->y);
  }
  out << "last_sf " << (round.last_sf ? 1 : 0) << "\n";
  if (round.last_sf) {
    out << "x\n";
    write_sym(out, round.last_sf->x);
  }
  out << "last_si " << (round.last_si ? 1 : 0) << "\n";
  if (round.last_si) {
    out << "s\n";
    write_sym(out, round.last_si->s);
  }
  out << "reduction " << (round.reduction ? 1 : 0) << "\n";
  if (round.reduction) {
    out << "k " << round.reduction->k << "\n";
    out << "l " << round.reduction->l << "\n";
    out << "slice_empty " << (round.reduction->slice_empty ? 1 : 0) << "\n";
    out << "w\n";
    write_sym(out, round.reduction->w);
    out << "M\n";
    write_full(out, round.reduction->normalizer);
  }
}

} // namespace

Problem parse_problem_text(const std::string& text, const Tolerances& tol) {
  Tokenizer tok(text);
  tok.expect_exact("sdfp");
  const Token v = tok.peek();
  if (tok.expect_int("format version") != 1)
    throw ParseError("unsupported document version", v.line, v.col);
  return parse_problem_body(tok, tol);
}

std::string problem_to_text(const Problem& p) {
  std::ostringstream out;
  out << "sdfp 1\n";
  write_problem_body(out, p);
  return out.str();
}

Problem parse_sdpa_text(const std::string& text, const Tolerances& tol) {
  // Strip comment lines, neutralize SDPA punctuation, then tokenize.
  std::ostringstream clean;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& ch : line)
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    clean << line << "\n";
  }
  Tokenizer tok(clean.str());
  const int m = static_cast<int>(tok.expect_int("constraint count"));
  const Token bt = tok.peek();
  const int nblocks = static_cast<int>(tok.expect_int("block count"));
  if (nblocks != 1)
    throw ParseError("only single-block SDPA problems are supported", bt.line, bt.col);
  const Token st = tok.peek();
  const int bsize = static_cast<int>(tok.expect_int("block size"));
  if (bsize < 1) throw ParseError("diagonal SDPA blocks are not supported", st.line, st.col);
  std::vector<double> rhs(m);
  for (auto& v : rhs) v = tok.expect_real("right-hand side");
  std::vector<SymMatrix> mats(m + 1, SymMatrix(bsize));
  while (!tok.eof()) {
    const Token kt = tok.peek();
    const int k = static_cast<int>(tok.expect_int("matrix index"));
    if (k < 0 || k > m) throw ParseError("matrix index out of range", kt.line, kt.col);
    const Token blt = tok.peek();
    const int blk = static_cast<int>(tok.expect_int("block index"));
    if (blk != 1) throw ParseError("only block 1 entries are supported", blt.line, blt.col);
    const Token it = tok.peek();
    const int i = static_cast<int>(tok.expect_int("row"));
    const int j = static_cast<int>(tok.expect_int("column"));
    const double v = tok.expect_real("value");
    if (i < 1 || j < 1 || i > bsize || j > bsize)
      throw ParseError("entry out of range", it.line, it.col);
    mats[k].set(i - 1, j - 1, v);
  }
  // Feasibility subset: find X PSD with <F_i, X> = b_i (objective ignored).
  std::ostringstream doc;
  doc << "sdfp 1\nn " << bsize << "\nform equations\nequations " << m << "\n";
  for (int i = 1; i <= m; ++i) {
    doc << "eq\n";
    write_sym(doc, mats[i]);
    doc << "rhs " << format_real(rhs[i - 1]) << "\n";
  }
  return parse_problem_text(doc.str(), tol);
}

Problem load_problem(const std::string& path, const Tolerances& tol) {
  const std::string text = read_file(path);
  // Native documents start with the magic token; everything else is
  // treated as SDPA sparse input.
  for (size_t i = 0; i < text.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) continue;
    if (text[i] == '#' || text[i] == '*' || text[i] == '"') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (text.compare(i, 4, "sdfp") == 0) return parse_problem_text(text, tol);
    break;
  }
  return parse_sdpa_text(text, tol);
}

void save_problem(const std::string& path, const Problem& p) {
  write_file(path, problem_to_text(p));
}

std::string certificate_to_text(const Certificate& c) {
  std::ostringstream out;
  out << "sdfpcert 1\n";
  out << "tol " << format_real(c.tol) << "\n";
  out << "status " << c.kind() << "\n";
  if (const auto* b = std::get_if<StrongFeasCert>(&c.body)) {
    out << "n " << b->x.dim() << "\nx\n";
    write_sym(out, b->x);
  } else if (const auto* b = std::get_if<WeakFeasCert>(&c.body)) {
    out << "n " << b->x.dim() << "\nx\n";
    write_sym(out, b->x);
    out << "y\n";
    write_sym(out, b->y);
  } else if (const auto* b = std::get_if<StrongInfeasCert>(&c.body)) {
    out << "n " << b->s.dim() << "\ns\n";
    write_sym(out, b->s);
  } else if (const auto* b = std::get_if<WeakStatusCert>(&c.body)) {
    const int n = b->fp.P.rows();
    out << "n " << n << "\n";
    write_fp(out, b->fp, n);
    out << "last\nx\n";
    write_sym(out, b->last.x);
    out << "y\n";
    write_sym(out, b->last.y);
  } else if (const auto* b = std::get_if<WeakInfeasCert>(&c.body)) {
    out << "rounds " << b->chain.size() << "\n";
    for (const auto& round : b->chain) write_round(out, round);
  }
  return out.str();
}

Certificate parse_certificate_text(const std::string& text) {
  Tokenizer tok(text);
  tok.expect_exact("sdfpcert");
  const Token v = tok.peek();
  if (tok.expect_int("format version") != 1)
    throw ParseError("unsupported certificate version", v.line, v.col);
  Certificate cert;
  tok.expect_exact("tol");
  cert.tol = tok.expect_real("tolerance");
  tok.expect_exact("status");
  const Token kind = tok.next();

  if (kind.s == "strong_feasible") {
    tok.expect_exact("n");
    const int n = static_cast<int>(tok.expect_int("dimension"));
    tok.expect_exact("x");
    cert.body = StrongFeasCert{read_sym(tok, n)};
  } else if (kind.s == "weak_feasible") {
    tok.expect_exact("n");
    const int n = static_cast<int>(tok.expect_int("dimension"));
    tok.expect_exact("x");
    const SymMatrix x = read_sym(tok, n);
    tok.expect_exact("y");
    cert.body = WeakFeasCert{x, read_sym(tok, n)};
  } else if (kind.s == "strong_infeasible") {
    tok.expect_exact("n");
    const int n = static_cast<int>(tok.expect_int("dimension"));
    tok.expect_exact("s");
    cert.body = StrongInfeasCert{read_sym(tok, n)};
  } else if (kind.s == "weak_status") {
    tok.expect_exact("n");
    const int n = static_cast<int>(tok.expect_int("dimension"));
    FPOutput fp = parse_fp(tok);
    const int last_n = n - fp.total_k();
    tok.expect_exact("last");
    tok.expect_exact("x");
    const SymMatrix x = read_sym(tok, last_n);
    tok.expect_exact("y");
    cert.body = WeakStatusCert{std::move(fp), WeakFeasCert{x, read_sym(tok, last_n)}};
  } else if (kind.s == "weak_infeasible") {
    tok.expect_exact("rounds");
    const int r = static_cast<int>(tok.expect_int("round count"));
    WeakInfeasCert body;
    for (int i = 0; i < r; ++i) body.chain.push_back(parse_round(tok));
    // Reconnect the reduced problems: each round's slice is the next input.
    for (size_t i = 0; i + 1 < body.chain.size(); ++i)
      if (body.chain[i].reduction && !body.chain[i].reduction->slice_empty)
        body.chain[i].reduction->reduced = body.chain[i + 1].problem;
    cert.body = std::move(body);
  } else {
    throw ParseError("unknown certificate status '" + kind.s + "'", kind.line, kind.col);
  }
  return cert;
}

Certificate load_certificate(const std::string& path) {
  return parse_certificate_text(read_file(path));
}

void save_certificate(const std::string& path, const Certificate& c) {
  write_file(path, certificate_to_text(c));
}

namespace {

std::string ks_string(const std::vector<int>& ks) {
  std::string out = "[";
  for (size_t i = 0; i < ks.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(ks[i]);
  }
  return out + "]";
}

} // namespace

std::string classification_report(const std::string& input_name, const Problem& p,
                                  const ClassificationResult& r) {
  std::ostringstream out;
  out << "input: " << input_name << "\n";
  out << "n: " << p.n() << "\n";
  out << "status: " << to_string(r.status) << "\n";
  out << "exit: " << status_exit_code(r.status) << "\n";
  out << "rounds: " << r.chain.size() << "\n";
  for (size_t i = 0; i < r.chain.size(); ++i) {
    const ChainRound& round = r.chain[i];
    out << "round " << (i + 1) << ": n=" << round.problem.n() << ", partition m=" << round.fp.m()
        << " ks=" << ks_string(round.fp.ks) << ", last n=" << round.fp.last.n() << " -> "
        << to_string(round.last_status);
    if (round.reduction) {
      out << ", reduction l=" << round.reduction->l;
      if (round.reduction->slice_empty) out << " -> empty slice";
      else out << " -> reduced n=" << (round.reduction->k + round.reduction->l);
    }
    out << "\n";
  }
  return out.str();
}

std::string classification_json(const std::string& input_name, const Problem& p,
                                const ClassificationResult& r, const Tolerances& tol) {
  nlohmann::ordered_json j;
  j["format"] = "sdfp-report";
  j["version"] = 1;
  j["input"] = input_name;
  j["n"] = p.n();
  j["status"] = status_token(r.status);
  j["exit"] = status_exit_code(r.status);
  j["tolerances"] = {{"tol", tol.psd},    {"tol_amb", tol.amb}, {"tol_rank", tol.rank},
                     {"tol_lin", tol.lin}, {"tol_pd", tol.pd},  {"cert", tol.cert}};
  j["rounds"] = nlohmann::ordered_json::array();
  for (const auto& round : r.chain) {
    nlohmann::ordered_json rj;
    rj["n"] = round.problem.n();
    rj["m"] = round.fp.m();
    rj["ks"] = round.fp.ks;
    rj["last_n"] = round.fp.last.n();
    rj["last_status"] = status_token(round.last_status);
    rj["last_value"] = round.last_value;
    if (round.reduction) {
      rj["reduction"] = {{"k", round.reduction->k},
                         {"l", round.reduction->l},
                         {"slice_empty", round.reduction->slice_empty}};
    } else {
      rj["reduction"] = nullptr;
    }
    j["rounds"].push_back(std::move(rj));
  }
  return j.dump(2) + "\n";
}

namespace {

nlohmann::ordered_json sym_json(const SymMatrix& s) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < s.dim(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < s.dim(); ++j) row.push_back(s(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

std::string approach_report(const std::string& input_name, const ApproachSequence& seq) {
  std::ostringstream out;
  out << "input: " << input_name << "\n";
  out << "directions: " << seq.alphas.size() << "\n";
  for (size_t i = 0; i < seq.alphas.size(); ++i)
    out << "alpha[" << (i + 1) << "]: " << format_real(seq.alphas[i]) << "\n";
  out << "achieved_dist: " << format_real(seq.achieved_dist) << "\n";
  out << "cprime:\n";
  write_sym(out, seq.cprime);
  out << "point:\n";
  write_sym(out, seq.point);
  return out.str();
}

std::string approach_json(const std::string& input_name, const ApproachSequence& seq, double eps) {
  nlohmann::ordered_json j;
  j["format"] = "sdfp-approach";
  j["version"] = 1;
  j["input"] = input_name;
  j["eps"] = eps;
  j["alphas"] = seq.alphas;
  j["achieved_dist"] = seq.achieved_dist;
  j["cprime"] = sym_json(seq.cprime);
  j["point"] = sym_json(seq.point);
  return j.dump(2) + "\n";
}

} // namespace sdfp::io

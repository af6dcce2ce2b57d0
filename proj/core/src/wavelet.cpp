#include "specmix/wavelet.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "specmix/parallel.hpp"

namespace specmix {
namespace {

constexpr double kDb1[] = {
    0.707106781186547524401,
    0.707106781186547524401};
constexpr double kDb2[] = {
    0.482962913144534143375,
    0.836516303737807905575,
    0.224143868042013381026,
    -0.129409522551260381174};
constexpr double kDb3[] = {
    0.332670552950082615999,
    0.806891509311092576494,
    0.459877502118491570095,
    -0.135011020010254588696,
    -0.0854412738820266616928,
    0.0352262918857095366027};
constexpr double kDb4[] = {
    0.230377813308896500863,
    0.71484657055291564709,
    0.630880767929858907882,
    -0.0279837694168598542114,
    -0.18703481171909308408,
    0.0308413818355607636272,
    0.0328830116668851997354,
    -0.0105974017850690321049};
constexpr double kDb5[] = {
    0.160102397974192914481,
    0.60382926979718967054,
    0.724308528437772927728,
    0.138428145901320731505,
    -0.242294887066382031863,
    -0.0322448695846383746485,
    0.0775714938400457135231,
    -0.00624149021279827427419,
    -0.0125807519990819994685,
    0.003335725285473771278};
constexpr double kDb6[] = {
    0.111540743350109463621,
    0.494623890398453085677,
    0.751133908021095350679,
    0.315250351709197629086,
    -0.226264693965439820076,
    -0.129766867567261935562,
    0.0975016055873230491023,
    0.0275228655303057286255,
    -0.0315820393174860295651,
    0.000553842201161496139252,
    0.00477725751094551063964,
    -0.00107730108530847956485};
constexpr double kDb7[] = {
    0.07785205408500917902,
    0.396539319481917306539,
    0.729132090846235119917,
    0.469782287405193122472,
    -0.143906003928564975405,
    -0.224036184993874982638,
    0.0713092192668302647509,
    0.0806126091510830719129,
    -0.0380299369350144135796,
    -0.0165745416306668806541,
    0.012550998556099840613,
    0.000429577972921366521132,
    -0.00180164070404749091527,
    0.000353713799974520248446};
constexpr double kDb8[] = {
    0.054415842243104009955,
    0.312871590914299970659,
    0.675630736297289806808,
    0.585354683654206712771,
    -0.0158291052563493056674,
    -0.284015542961546926516,
    0.000472484573913282770361,
    0.128747426620478458857,
    -0.0173693010018075461696,
    -0.0440882539307947515068,
    0.0139810279173982816487,
    0.00874609404740577671638,
    -0.00487035299345157431042,
    -0.000391740373376947046298,
    0.00067544940645056936637,
    -0.000117476784124769533731};
constexpr double kDb9[] = {
    0.0380779473638783465887,
    0.243834674612590353732,
    0.604823123690111111903,
    0.657288078051300538078,
    0.133197385825007576191,
    -0.293273783279174908806,
    -0.0968407832229764605135,
    0.148540749338106380135,
    0.0307256814793333792123,
    -0.0676328290613299736756,
    0.000250947114831451957587,
    0.0223616621236790972054,
    -0.00472320475775139727793,
    -0.0042815036824634298345,
    0.00184764688305622647662,
    0.000230385763523195967205,
    -0.000251963188942710136975,
    0.0000393473203162715994807};
constexpr double kDb10[] = {
    0.0266700579005555535866,
    0.188176800077691489021,
    0.527201188931725586482,
    0.688459039453603565742,
    0.281172343660577460749,
    -0.249846424327315379416,
    -0.195946274377377043504,
    0.127369340335793260083,
    0.0930573646035723511604,
    -0.0713941471663970871453,
    -0.0294575368218758128583,
    0.0332126740593410017398,
    0.00360655356695616965542,
    -0.0107331754833305750443,
    0.00139535174705290116579,
    0.00199240529518505611716,
    -0.000685856694959711626561,
    -0.000116466855129285450951,
    0.0000935886703200695913341,
    -0.0000132642028945212448124};


constexpr std::array<std::span<const double>, kMaxVanishingMoments> kFilters{
    kDb1, kDb2, kDb3, kDb4, kDb5, kDb6, kDb7, kDb8, kDb9, kDb10};

double orthonormality_error(std::span<const double> h) {
  const auto L = static_cast<std::ptrdiff_t>(h.size());
  double sum = 0.0;
  for (double c : h) sum += c;
  double err = std::abs(sum - std::sqrt(2.0));
  for (std::ptrdiff_t shift = 0; shift < L; shift += 2) {
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i + shift < L; ++i) acc += h[i] * h[i + shift];
    err = std::max(err, std::abs(acc - (shift == 0 ? 1.0 : 0.0)));
  }
  return err;
}

void validate(Index T, const WaveletBasisSpec& basis) {
  require(basis.vanishing_moments >= 1 && basis.vanishing_moments <= kMaxVanishingMoments,
          ErrorKind::InvalidArgument,
          "vanishing moments must lie in [1, " + std::to_string(kMaxVanishingMoments) + "]");
  require(is_power_of_two(T), ErrorKind::NonDyadicLength,
          "length " + std::to_string(T) + " is not a power of two");
  require(T >= 2 * basis.vanishing_moments, ErrorKind::LengthBelowFilterSupport,
          "length " + std::to_string(T) + " is shorter than the filter support " +
              std::to_string(2 * basis.vanishing_moments));
}

inline double highpass(std::span<const double> h, std::size_t i) {
  const double c = h[h.size() - 1 - i];
  return (i % 2 == 0) ? c : -c;
}

}  // namespace

std::span<const double> scaling_filter(int vanishing_moments) {
  require(vanishing_moments >= 1 && vanishing_moments <= kMaxVanishingMoments,
          ErrorKind::InvalidArgument, "unsupported number of vanishing moments");
  static const bool checked = [] {
    require(filter_orthonormality_error() <= 1e-12, ErrorKind::DomainError,
            "embedded wavelet filters fail the orthonormality check");
    return true;
  }();
  (void)checked;
  return kFilters[static_cast<std::size_t>(vanishing_moments - 1)];
}

double filter_orthonormality_error() {
  double err = 0.0;
  for (auto h : kFilters) err = std::max(err, orthonormality_error(h));
  return err;
}

Vector dwt(const Vector& v, const WaveletBasisSpec& basis) {
  const Index T = v.size();
  validate(T, basis);
  const auto h = scaling_filter(basis.vanishing_moments);
  std::vector<double> cur(v.data(), v.data() + T), tmp(static_cast<std::size_t>(T));
  for (Index n = T; n >= 2; n /= 2) {
    const Index half = n / 2;
    for (Index m = 0; m < half; ++m) {
      double a = 0.0, d = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = cur[static_cast<std::size_t>((2 * m + static_cast<Index>(i)) % n)];
        a += h[i] * x;
        d += highpass(h, i) * x;
      }
      tmp[static_cast<std::size_t>(m)] = a;
      tmp[static_cast<std::size_t>(half + m)] = d;
    }
    std::copy(tmp.begin(), tmp.begin() + n, cur.begin());
  }
  Vector out = Eigen::Map<const Vector>(cur.data(), T);
  return out / std::sqrt(static_cast<double>(T));
}

Vector idwt(const Vector& c, const WaveletBasisSpec& basis) {
  const Index T = c.size();
  validate(T, basis);
  const auto h = scaling_filter(basis.vanishing_moments);
  std::vector<double> cur(c.data(), c.data() + T), tmp(static_cast<std::size_t>(T));
  for (Index n = 2; n <= T; n *= 2) {
    const Index half = n / 2;
    std::fill(tmp.begin(), tmp.begin() + n, 0.0);
    for (Index m = 0; m < half; ++m) {
      const double a = cur[static_cast<std::size_t>(m)];
      const double d = cur[static_cast<std::size_t>(half + m)];
      for (std::size_t i = 0; i < h.size(); ++i)
        tmp[static_cast<std::size_t>((2 * m + static_cast<Index>(i)) % n)] += h[i] * a + highpass(h, i) * d;
    }
    std::copy(tmp.begin(), tmp.begin() + n, cur.begin());
  }
  Vector out = Eigen::Map<const Vector>(cur.data(), T);
  return out * std::sqrt(static_cast<double>(T));
}

Matrix dwt_rows(const Matrix& rows, const WaveletBasisSpec& basis) {
  Matrix out(rows.rows(), rows.cols());
  validate(rows.cols(), basis);
  parallel_for(static_cast<std::size_t>(rows.rows()), [&](std::size_t s) {
    const auto i = static_cast<Index>(s);
    out.row(i) = dwt(rows.row(i).transpose(), basis).transpose();
  });
  return out;
}

Matrix idwt_rows(const Matrix& rows, const WaveletBasisSpec& basis) {
  Matrix out(rows.rows(), rows.cols());
  validate(rows.cols(), basis);
  parallel_for(static_cast<std::size_t>(rows.rows()), [&](std::size_t s) {
    const auto i = static_cast<Index>(s);
    out.row(i) = idwt(rows.row(i).transpose(), basis).transpose();
  });
  return out;
}

CoefficientPanel to_coefficients(const LogPeriodogramPanel& panel, const WaveletBasisSpec& basis) {
  return CoefficientPanel(dwt_rows(panel.values(), basis));
}

int scale_of_index(Index k, Index T) {
  require(k >= 1 && k <= T, ErrorKind::IndexOutOfRange,
          "index " + std::to_string(k) + " outside 1.." + std::to_string(T));
  if (k == 1) return -1;
  int j = 0;
  for (Index m = k - 1; m > 1; m >>= 1) ++j;
  return j;
}

SparseCoefficients sparsify(const Vector& h, double tol) {
  require(tol >= 0.0, ErrorKind::InvalidArgument, "tolerance must be nonnegative");
  SparseCoefficients out{h, {}};
  std::vector<Index> keep;
  for (Index k = 0; k < h.size(); ++k) {
    if (std::abs(h[k]) < tol)
      out.values[k] = 0.0;
    else
      keep.push_back(k);
  }
  out.support = SelectedSet(std::move(keep), tol);
  return out;
}

}  // namespace specmix

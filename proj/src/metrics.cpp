#include "octaseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace octaseg {

ConfusionCounts confusion(const BinaryMask& seg, const BinaryMask& gt) {
    require_same_shape(seg, gt, "confusion");
    ConfusionCounts c;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const bool s = seg[i], g = gt[i];
        if (s && g) ++c.tp;
        else if (s) ++c.fp;
        else if (g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

PixelMetrics pixel_metrics(const ConfusionCounts& c) {
    const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const auto tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    PixelMetrics m;
    const double dice_den = 2.0 * tp + fp + fn;
    m.dice = dice_den > 0.0 ? 2.0 * tp / dice_den : 1.0;
    m.accuracy = c.total() > 0 ? (tp + tn) / static_cast<double>(c.total()) : 1.0;
    if (tp + fp > 0.0) m.precision = tp / (tp + fp);
    if (tp + fn > 0.0) m.recall = tp / (tp + fn);
    return m;
}

std::optional<double> cohens_kappa(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "cohens_kappa");
    const auto n = static_cast<double>(a.size());
    const ConfusionCounts c = confusion(a, b);
    const double observed = static_cast<double>(c.tp + c.tn) / n;
    const double pa = static_cast<double>(c.tp + c.fp) / n;
    const double pb = static_cast<double>(c.tp + c.fn) / n;
    const double chance = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (chance >= 1.0) {
        if (a == b) return 1.0;
        return std::nullopt;
    }
    return (observed - chance) / (1.0 - chance);
}

CalScore cal_metric(const BinaryMask& seg, const BinaryMask& gt, double alpha, double beta) {
    require_same_shape(seg, gt, "cal_metric");
    const auto gt_pixels = static_cast<double>(gt.count());
    if (gt_pixels == 0.0) throw std::invalid_argument("cal_metric: ground truth has no vessel pixels");

    CalScore s;
    const int comp_seg = connected_components(seg, Connectivity::Eight).count;
    const int comp_gt = connected_components(gt, Connectivity::Eight).count;
    s.connectivity = 1.0 - std::min(1.0, std::abs(comp_gt - comp_seg) / gt_pixels);

    const BinaryMask seg_dil = dilate_disc(seg, alpha);
    const BinaryMask gt_dil = dilate_disc(gt, alpha);
    const auto area_num =
        mask_union(mask_intersection(seg_dil, gt), mask_intersection(seg, gt_dil)).count();
    s.area = static_cast<double>(area_num) / static_cast<double>(mask_union(seg, gt).count());

    const BinaryMask seg_skel = skeletonize(seg);
    const BinaryMask gt_skel = skeletonize(gt);
    const auto len_num = mask_union(mask_intersection(seg_skel, dilate_disc(gt, beta)),
                                    mask_intersection(dilate_disc(seg, beta), gt_skel))
                             .count();
    s.length = static_cast<double>(len_num) / static_cast<double>(mask_union(seg_skel, gt_skel).count());

    s.cal = s.connectivity * s.area * s.length;
    return s;
}

std::optional<double> clamped_similarity(double value, double reference) {
    if (reference == 0.0) return std::nullopt;
    return 1.0 - std::min(1.0, std::abs(value - reference) / reference);
}

std::optional<double> lcc_ratio(const BinaryMask& seg, const BinaryMask& gt) {
    require_same_shape(seg, gt, "lcc_ratio");
    const auto l_gt = largest_component_length(skeletonize(gt));
    const auto l_seg = largest_component_length(skeletonize(seg));
    return clamped_similarity(static_cast<double>(l_seg), static_cast<double>(l_gt));
}

std::optional<double> tops(const BinaryMask& seg, const BinaryMask& gt) {
    require_same_shape(seg, gt, "tops");
    return clamped_similarity(betti_numbers(seg).b1, betti_numbers(gt).b1);
}

double vessel_density(const BinaryMask& mask) {
    return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

double acircularity(double perimeter, double area) {
    if (!(area > 0.0)) throw std::invalid_argument("acircularity needs a positive area");
    return perimeter / (2.0 * std::sqrt(std::numbers::pi * area));
}

double acircularity(const FazRegion& faz) { return acircularity(faz.perimeter, faz.area); }

std::optional<double> relative_error(double measured, double truth) {
    if (truth == 0.0) return std::nullopt;
    return std::abs(measured - truth) / std::abs(truth);
}

std::optional<FazMeasure> measure_faz(const BinaryMask& mask) {
    try {
        const FazRegion faz = detect_faz(skeletonize(mask));
        return FazMeasure{faz.area, faz.perimeter, acircularity(faz)};
    } catch (const NoLoopError&) {
        return std::nullopt;
    }
}

EvalReport evaluate(const BinaryMask& seg, const BinaryMask& gt) {
    require_same_shape(seg, gt, "evaluate");
    EvalReport r;
    const PixelMetrics pm = pixel_metrics(confusion(seg, gt));
    r.dice = pm.dice;
    r.accuracy = pm.accuracy;
    r.precision = pm.precision;
    r.recall = pm.recall;
    r.kappa = cohens_kappa(seg, gt);

    if (gt.count() > 0) {
        const CalScore cal = cal_metric(seg, gt, 1.0, 1.0);
        r.c = cal.connectivity;
        r.a = cal.area;
        r.l = cal.length;
        r.cal = cal.cal;
    }
    r.lcc = lcc_ratio(seg, gt);
    r.tops = tops(seg, gt);

    r.vessel_density_seg = vessel_density(seg);
    r.vessel_density_gt = vessel_density(gt);
    r.vd_rel_error = relative_error(r.vessel_density_seg, r.vessel_density_gt);

    r.faz_seg = measure_faz(seg);
    r.faz_gt = measure_faz(gt);
    if (r.faz_seg && r.faz_gt) {
        r.faz_area_rel_error = relative_error(r.faz_seg->area, r.faz_gt->area);
        r.acircularity_rel_error = relative_error(r.faz_seg->acircularity, r.faz_gt->acircularity);
    }
    return r;
}

}  // namespace octaseg

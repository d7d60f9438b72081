"""Template, allocation and realization tests.

The parameter/FLOP oracle below is a hand-transcribed layer table computed
independently of the library walk: every conv carries 9*c_in*c_out weights,
a bias and two batch-norm parameters per output feature; fully connected
layers carry weights and biases; the class projection is a plain 10-way
fully connected layer.
"""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from featuregrid import (
    FeatureAllocation,
    LayerSlot,
    NetworkTemplate,
    SkewNormalParams,
    allocate,
    bin_masses,
    classify_shape,
    default_vgg10_template,
    default_vgg16_template,
    get_template,
    has_full_coverage,
    is_valid,
    realize,
    template_budget,
    vgg_budget,
)

VGG16_WIDTHS = (64, 64, 128, 128, 256, 256, 256, 512, 512, 512, 512, 512, 512,
                4096, 4096, 4096)

PARAMS = SkewNormalParams(8.5, 2.0, 0.0)


def hand_oracle(conv_widths, fc_widths, pools_after, height, classes):
    """Spreadsheet-style parameter and FLOP totals, slot by slot."""
    params = 0
    flops = 0
    size = height
    c_in = 3
    for i, w in enumerate(conv_widths, start=1):
        params += 9 * c_in * w  # 3x3 kernels
        params += w             # biases
        params += 2 * w         # batch-norm scale and shift
        flops += 2 * 9 * c_in * w * size * size
        if i in pools_after:
            size //= 2
        c_in = w
    n_in = size * size * c_in
    for w in fc_widths:
        params += n_in * w + w
        flops += 2 * n_in * w
        n_in = w
    params += n_in * classes + classes
    flops += 2 * n_in * classes
    return params, flops


def make_allocation(counts, budget=None, captured=1.0):
    return FeatureAllocation(
        counts=tuple(counts),
        budget=budget if budget is not None else sum(counts),
        captured_mass=captured,
    )


class TestTemplates:
    def test_vgg16_structure(self):
        template = default_vgg16_template()
        assert template.slot_count == 16
        kinds = [slot.kind for slot in template.slots]
        assert kinds.count("conv3x3") == 13
        assert kinds.count("fully_connected") == 3
        pooled = [i for i, slot in enumerate(template.slots, 1) if slot.pool_after]
        assert pooled == [2, 4, 7, 10, 13]
        assert (template.input_height, template.input_width) == (32, 32)
        assert template.input_channels == 3 and template.class_count == 10

    def test_vgg10_structure(self):
        template = default_vgg10_template()
        assert template.slot_count == 10
        pooled = [i for i, slot in enumerate(template.slots, 1) if slot.pool_after]
        assert pooled == [2, 4, 6, 8]

    def test_registry(self):
        assert get_template("vgg16") == default_vgg16_template()
        with pytest.raises(ValueError):
            get_template("vgg19")

    def test_conv_after_fc_rejected(self):
        with pytest.raises(ValueError):
            NetworkTemplate(
                name="bad",
                slots=(LayerSlot("fully_connected"), LayerSlot("conv3x3")),
            )

    def test_pool_on_fc_rejected(self):
        with pytest.raises(ValueError):
            LayerSlot("fully_connected", pool_after=True)

    def test_excess_pooling_rejected(self):
        slots = tuple(LayerSlot("conv3x3", pool_after=True) for _ in range(6))
        with pytest.raises(ValueError):
            NetworkTemplate(name="bad", slots=slots)  # 2^6 > 32

    def test_unknown_slot_kind_rejected(self):
        with pytest.raises(ValueError):
            LayerSlot("conv5x5")


class TestBudgets:
    def test_vgg16_budget_portions(self):
        assert sum(VGG16_WIDTHS[:13]) == 4224
        assert sum(VGG16_WIDTHS[13:]) == 12288
        assert vgg_budget(default_vgg16_template()) == 16512

    def test_vgg_budget_rejects_other_templates(self):
        with pytest.raises(ValueError):
            vgg_budget(default_vgg10_template())

    def test_template_budget(self):
        assert template_budget(default_vgg16_template()) == 16512
        assert template_budget(default_vgg10_template()) == 10112

    def test_template_budget_unknown_name(self):
        template = NetworkTemplate(name="custom", slots=(LayerSlot("conv3x3"),))
        with pytest.raises(ValueError):
            template_budget(template)


class TestAllocate:
    def test_uniform_masses(self):
        masses = bin_masses(SkewNormalParams(8.5, 100.0, 0.0), 16, 64)
        # not exactly uniform; use a synthetic uniform distribution instead
        from featuregrid import BinMasses

        uniform = BinMasses(masses=(1.0 / 16,) * 16, layer_count=16, subdivisions=1)
        allocation = allocate(uniform, 4224)
        assert allocation.counts == (264,) * 16
        assert allocation.captured_mass == pytest.approx(1.0)
        assert masses.layer_count == 16

    def test_tiny_mass_floors_to_one(self):
        from featuregrid import BinMasses

        masses = BinMasses(
            masses=(0.0001, 0.9), layer_count=2, subdivisions=1
        )
        allocation = allocate(masses, 4224)
        assert allocation.counts[0] == 1  # round(0.42) == 0, floored
        assert allocation.starved_slots == 1
        assert not has_full_coverage(allocation)

    def test_rounding_is_half_away_from_zero(self):
        from featuregrid import BinMasses

        masses = BinMasses(masses=(0.25, 0.35), layer_count=2, subdivisions=1)
        allocation = allocate(masses, 10)  # shares 2.5 and 3.5
        assert allocation.counts == (3, 4)

    def test_budget_below_layer_count_rejected(self):
        masses = bin_masses(PARAMS, 16, 32)
        with pytest.raises(ValueError):
            allocate(masses, 15)

    def test_captured_mass_is_mass_total(self):
        masses = bin_masses(PARAMS, 16, 128)
        allocation = allocate(masses, 16512)
        assert allocation.captured_mass == masses.total()


class TestValidity:
    def test_boundaries(self):
        assert is_valid(make_allocation([10] * 16, captured=1.0))
        assert not is_valid(make_allocation([10] * 16, captured=0.94))
        assert is_valid(make_allocation([10] * 16, captured=0.95))

    def test_custom_tolerance(self):
        allocation = make_allocation([10] * 16, captured=0.90)
        assert not is_valid(allocation, 0.05)
        assert is_valid(allocation, 0.10)

    @pytest.mark.parametrize("tolerance", [0.0, 1.0, -0.2, 1.5])
    def test_tolerance_domain(self, tolerance):
        with pytest.raises(ValueError):
            is_valid(make_allocation([10] * 16), tolerance)


class TestAllocationInvariants:
    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            make_allocation([0, 5])

    def test_over_budget_rejected(self):
        with pytest.raises(ValueError):
            FeatureAllocation(counts=(50, 50), budget=10, captured_mass=1.0)

    def test_captured_mass_range(self):
        with pytest.raises(ValueError):
            make_allocation([5, 5], captured=1.5)


class TestClassifyShape:
    def test_vgg_like_is_increasing(self):
        assert classify_shape(make_allocation(VGG16_WIDTHS)) == "increasing"

    def test_flat(self):
        assert classify_shape(make_allocation([264] * 16)) == "flat"

    def test_peaked(self):
        assert classify_shape(make_allocation([10, 500, 10, 10])) == "peaked"

    def test_decreasing(self):
        assert classify_shape(make_allocation([500, 400, 300, 300])) == "decreasing"

    def test_single_slot_is_flat(self):
        assert classify_shape(make_allocation([7])) == "flat"


class TestRealize:
    def test_reference_widths_match_hand_oracle(self):
        template = default_vgg16_template()
        allocation = make_allocation(VGG16_WIDTHS, budget=16512)
        spec = realize(template, allocation, PARAMS)
        expected_params, expected_flops = hand_oracle(
            VGG16_WIDTHS[:13], VGG16_WIDTHS[13:], {2, 4, 7, 10, 13}, 32, 10
        )
        assert spec.parameter_count == expected_params == 50427978
        assert spec.flop_count == expected_flops == 697778176

    def test_first_conv_parameters(self):
        # 9*3*64 + 64 = 1792 weights+bias, plus 2*64 batch-norm
        template = default_vgg16_template()
        base = realize(template, make_allocation([1] * 16, budget=16), PARAMS)
        bumped = realize(
            template, make_allocation([64] + [1] * 15, budget=79), PARAMS
        )
        delta = bumped.parameter_count - base.parameter_count
        # widening slot 1 from 1 to 64 features also widens slot 2's input
        assert delta == (9 * 3 * 64 + 64 + 128) - (9 * 3 + 3) + 9 * 1 * (64 - 1)

    def test_classifier_parameters(self):
        # final projection from 512 hidden units onto 10 classes
        template = default_vgg10_template()
        counts = [1] * 9 + [512]
        spec = realize(template, make_allocation(counts), PARAMS)
        widths = counts[:8]
        params, flops = hand_oracle(widths, counts[8:], {2, 4, 6, 8}, 32, 10)
        assert spec.parameter_count == params
        assert 512 * 10 + 10 == 5130  # classifier share of the hand table

    def test_spatial_chain_reaches_one(self):
        template = default_vgg16_template()
        spec = realize(template, make_allocation([8] * 16, budget=200), PARAMS)
        conv_shapes = spec.layer_shapes[:13]
        assert conv_shapes[-1][:2] == (1, 1)  # 32 / 2^5
        assert spec.layer_shapes[-1] == (10,)

    def test_length_mismatch_rejected(self):
        template = default_vgg16_template()
        with pytest.raises(ValueError):
            realize(template, make_allocation([8] * 10, budget=200), PARAMS)

    def test_arch_id_deterministic_and_distinct(self):
        template = default_vgg16_template()
        a = realize(template, make_allocation([8] * 16, budget=200), PARAMS)
        b = realize(template, make_allocation([8] * 16, budget=200), PARAMS)
        c = realize(template, make_allocation([9] + [8] * 15, budget=200), PARAMS)
        assert a.arch_id == b.arch_id
        assert a.arch_id != c.arch_id
        assert len(a.arch_id) == 16


counts_strategy = st.lists(st.integers(1, 600), min_size=16, max_size=16)


class TestRealizeProperties:
    @given(counts_strategy, st.integers(0, 15))
    def test_extra_feature_strictly_increases_parameters(self, counts, slot):
        template = default_vgg16_template()
        budget = sum(counts) + 1
        base = realize(template, make_allocation(counts, budget=budget), PARAMS)
        bumped_counts = list(counts)
        bumped_counts[slot] += 1
        bumped = realize(
            template, make_allocation(bumped_counts, budget=budget), PARAMS
        )
        assert bumped.parameter_count > base.parameter_count

    @given(counts_strategy)
    def test_shape_chain_is_consistent(self, counts):
        template = default_vgg16_template()
        spec = realize(template, make_allocation(counts), PARAMS)
        size = 32
        for slot, count, shape in zip(template.slots, counts, spec.layer_shapes):
            if slot.kind == "conv3x3":
                if slot.pool_after:
                    size //= 2
                assert shape == (size, size, count)
            else:
                assert shape == (count,)
        assert spec.layer_shapes[-1] == (10,)

    @given(st.floats(0.5, 5.5))
    def test_symmetric_params_give_palindromic_counts(self, omega):
        params = SkewNormalParams(8.5, omega, 0.0)
        allocation = allocate(bin_masses(params, 16, 256), 16512)
        counts = allocation.counts
        for i in range(16):
            assert abs(counts[i] - counts[15 - i]) <= 1

    @given(st.floats(1.0, 16.0), st.floats(0.5, 5.5), st.floats(-40.0, 40.0))
    def test_budget_conservation_for_valid_allocations(self, xi, omega, alpha):
        budget = 16512
        masses = bin_masses(SkewNormalParams(xi, omega, alpha), 16, 128)
        allocation = allocate(masses, budget)
        if not is_valid(allocation):
            return
        slack = 0.5 * 16
        floor_lift = allocation.starved_slots  # slots lifted to one feature
        assert budget * 0.95 - slack <= allocation.total()
        assert allocation.total() <= budget + slack + floor_lift

import random
from datetime import date, timedelta

import pytest

from esgrisk.aggregate import AssignedMessage, build_series
from esgrisk.taxonomy import PARENT, SUBCATEGORIES, Node
from esgrisk.trading import TradingCalendar


def weekday_calendar(n, start=date(2020, 1, 6)):
    days, d = [], start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return TradingCalendar(days)


def msg(firm, day_index, nodes=(), score=0.0):
    return AssignedMessage(
        firm=firm, day_index=day_index, nodes=frozenset(nodes), score=score
    )


def test_closure_counting():
    cal = weekday_calendar(5)
    agg = build_series(
        [msg("A", 2, {Node.CLIMATE_CHANGE}) for _ in range(3)], cal
    )
    for node in (Node.CLIMATE_CHANGE, Node.ENVIRONMENT, Node.ESG_ALL):
        assert agg.series("A", node).counts[2] == 3
    assert agg.series("A", Node.SOCIAL) is None


def test_totals_count_unmatched_messages():
    cal = weekday_calendar(3)
    records = [msg("A", 1, {Node.CORPORATE_GOVERNANCE}) for _ in range(4)]
    records += [msg("A", 1) for _ in range(96)]
    agg = build_series(records, cal)
    series = agg.series("A", Node.CORPORATE_GOVERNANCE)
    assert series.counts[1] == 4
    assert series.totals[1] == 100
    assert series.share(1) == pytest.approx(0.04)


def test_missing_days_are_zero():
    cal = weekday_calendar(4)
    agg = build_series([msg("A", 0, {Node.HUMAN_CAPITAL})], cal)
    series = agg.series("A", Node.HUMAN_CAPITAL)
    assert list(series.counts) == [1, 0, 0, 0]
    assert series.share(2) == 0.0
    assert series.sentiment(2) is None


def test_total_conservation_and_hierarchy_bounds():
    cal = weekday_calendar(30)
    rng = random.Random(23)
    records = []
    for i in range(500):
        k = rng.randint(0, 2)
        nodes = frozenset(rng.sample(SUBCATEGORIES, k))
        records.append(msg(rng.choice("AB"), rng.randrange(30), nodes, rng.uniform(-1, 1)))
    agg = build_series(records, cal)

    # conservation: firm totals sum to the number of that firm's messages
    for firm in agg.firms():
        assert agg.totals[firm].sum() == sum(1 for r in records if r.firm == firm)

    # set-union counting: pillar >= subcategory, root >= pillar, pointwise
    for series in agg:
        node = series.node
        parent = PARENT[node]
        if parent is not None:
            parent_series = agg.series(series.firm, parent)
            assert (parent_series.counts >= series.counts).all()
        assert (series.totals >= series.counts).all()


def test_daily_sentiment_is_mean_of_scores():
    cal = weekday_calendar(2)
    records = [
        msg("A", 0, {Node.PRODUCT_LIABILITY}, 0.3),
        msg("A", 0, {Node.PRODUCT_LIABILITY}, -0.5),
    ]
    agg = build_series(records, cal)
    assert agg.series("A", Node.PRODUCT_LIABILITY).sentiment(0) == pytest.approx(-0.1)


def test_multilabel_message_counts_once_per_node():
    cal = weekday_calendar(2)
    agg = build_series(
        [msg("A", 0, {Node.HUMAN_CAPITAL, Node.CORPORATE_GOVERNANCE}, -0.2)], cal
    )
    assert agg.series("A", Node.HUMAN_CAPITAL).counts[0] == 1
    assert agg.series("A", Node.CORPORATE_GOVERNANCE).counts[0] == 1
    # one message under two pillars still counts once at the root
    assert agg.series("A", Node.ESG_ALL).counts[0] == 1
    assert agg.totals["A"][0] == 1


def test_iteration_order_is_deterministic():
    from esgrisk.taxonomy import node_sort_key

    cal = weekday_calendar(2)
    records = [
        msg("B", 0, {Node.CLIMATE_CHANGE}),
        msg("A", 0, {Node.CORPORATE_BEHAVIOR}),
        msg("A", 1, {Node.NATURAL_CAPITAL}),
    ]
    agg = build_series(records, cal)
    keys = [(s.firm, s.node) for s in agg]
    assert keys == sorted(keys, key=lambda k: (k[0], node_sort_key(k[1])))
    # within firm A: Environment block precedes Governance block
    a_nodes = [node for firm, node in keys if firm == "A"]
    assert a_nodes.index(Node.NATURAL_CAPITAL) < a_nodes.index(Node.CORPORATE_BEHAVIOR)

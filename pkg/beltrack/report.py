# Software License Agreement (BSD License)
#
# Copyright (c) 2026, beltrack contributors
# All rights reserved.
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions
# are met:
#
#  * Redistributions of source code must retain the above copyright
#    notice, this list of conditions and the following disclaimer.
#  * Redistributions in binary form must reproduce the above
#    copyright notice, this list of conditions and the following
#    disclaimer in the documentation and/or other materials provided
#    with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED.

"""
Verdict tables: an in-memory numpy table, a CSV dump of it and an HTML
summary page rendered from an EmPy template.
"""

import csv
import html
from importlib import resources

import em
import numpy as np

from .core import BinaryQuality
from .metrics import UndefinedMetric, defect_ratio

COLUMNS = [('track_id', int), ('category', int), ('category_name', object),
           ('binary', object), ('k', int), ('votes', object),
           ('stability_frame_wise', float)]


def expand_template(template, d):
    return em.expand(template, **d)


def load_template(name):
    return resources.files('beltrack').joinpath('resources', 'templates', name).read_text()


def make_verdict_table(verdicts):
    """
    One row per verdict, in track id order. Per-category votes are joined
    with ``|``; a missing frame-wise stability is NaN.
    """
    table = np.empty(len(verdicts), dtype=COLUMNS)
    for i, v in enumerate(sorted(verdicts, key=lambda v: v.track_id)):
        table['track_id'][i] = v.track_id
        table['category'][i] = v.final_category.index
        table['category_name'][i] = v.final_category.name
        table['binary'][i] = str(v.final_binary)
        table['k'][i] = v.k
        table['votes'][i] = '|'.join(str(c) for c in v.vote_counts)
        table['stability_frame_wise'][i] = (np.nan if v.stability_frame_wise is None
                                            else v.stability_frame_wise)
    return table


def summarize_table(table, verdicts):
    """
    Headline numbers for a verdict table built from ``verdicts``; a ratio
    over zero tracks is ``None``.
    """
    n_defect = int(np.sum(table['binary'] == str(BinaryQuality.DEFECT)))
    stabilities = table['stability_frame_wise'][~np.isnan(table['stability_frame_wise'])]
    try:
        ratio = defect_ratio(verdicts)
    except UndefinedMetric:
        ratio = None
    summary = {
        'n_tracks': len(table),
        'n_defect_tracks': n_defect,
        'defect_ratio': ratio,
        'mean_stability_frame_wise': float(np.mean(stabilities)) if len(stabilities) else None,
    }
    summary['defect_ratio_text'] = _fmt(summary['defect_ratio'])
    summary['mean_stability_text'] = _fmt(summary['mean_stability_frame_wise'])
    return summary


def _fmt(value):
    """
    >>> _fmt(None)
    'n/a'
    >>> _fmt(0.25)
    '0.2500'
    """
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return 'n/a'
    if isinstance(value, float):
        return '%.4f' % value
    return str(value)


def render_csv(table, outfile):
    with open(outfile, 'w', newline='') as fh:
        w = csv.writer(fh)
        w.writerow(table.dtype.names)
        for row in table:
            w.writerow([_fmt(c.item() if hasattr(c, 'item') else c) for c in row])


def render_html(table, title, summary):
    rows = [dict((name, html.escape(_fmt(row[name].item() if hasattr(row[name], 'item') else row[name])))
                 for name in table.dtype.names)
            for row in table]
    d = {'title': html.escape(title),
         'columns': list(table.dtype.names),
         'rows': rows,
         'summary': summary}
    return expand_template(load_template('report.html.em'), d)


def write_report(verdicts, csv_path=None, html_path=None, title='beltrack'):
    """
    :returns: the summary dict of :func:`summarize_table`
    """
    table = make_verdict_table(verdicts)
    summary = summarize_table(table, verdicts)
    if csv_path:
        render_csv(table, csv_path)
    if html_path:
        with open(html_path, 'w') as f:
            f.write(render_html(table, title, summary))
    return summary

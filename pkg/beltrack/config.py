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
YAML experiment configuration.

A config file has up to five sections, each mapping field names of one
config dataclass to values::

    tracker:
      max_frames_lost: 10
    aggregation:
      tie_break: lowest_index
"""

import logging
import os
from dataclasses import dataclass, field, fields

import yaml

from .aggregation import AggregationConfig
from .byte_tracker import TrackerConfig
from .conveyor_sim import SimConfig
from .core import BeltrackError
from .kalman_filter import KalmanConfig
from .metrics import MetricsConfig

CONFIG_ENV_VAR = 'BELTRACK_CONFIG'

SECTIONS = {
    'kalman': KalmanConfig,
    'tracker': TrackerConfig,
    'aggregation': AggregationConfig,
    'metrics': MetricsConfig,
    'simulator': SimConfig,
}


class InvalidConfig(BeltrackError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    aggregation: AggregationConfig = field(default_factory=AggregationConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    simulator: SimConfig = field(default_factory=SimConfig)


def section_fields(section):
    return [f.name for f in fields(SECTIONS[section])]


def get_default_config_file():
    """
    :returns: the path named by ``$BELTRACK_CONFIG``, or ``None``
    """
    return os.environ.get(CONFIG_ENV_VAR) or None


def load_config_file(config_file):
    """
    :raises: :exc:`InvalidConfig` for a missing or unreadable file, an
      unknown section or an unknown key
    :returns: dict of section name to ``{field: value}``
    """
    if not os.path.isfile(config_file):
        raise InvalidConfig("config file [%s] does not exist" % config_file)
    with open(config_file) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as ex:
            raise InvalidConfig("config file [%s] is not valid YAML: %s" % (config_file, ex))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidConfig("config file [%s] must hold a mapping of sections" % config_file)
    for section, values in data.items():
        if section not in SECTIONS:
            raise InvalidConfig("%s: unknown section '%s' (expected one of %s)" %
                                (config_file, section, ', '.join(sorted(SECTIONS))))
        if values is None:
            data[section] = values = {}
        if not isinstance(values, dict):
            raise InvalidConfig("%s: section '%s' must be a mapping" % (config_file, section))
        known = section_fields(section)
        for key in values:
            if key not in known:
                raise InvalidConfig("%s: unknown key '%s' in section '%s'" %
                                    (config_file, key, section))
    return data


def build_config(file_values=None, flag_values=None):
    """
    Merge defaults, explicit command-line values and config-file values,
    in that order of precedence. A file value that overrides a differing
    flag is logged as a warning.

    :param file_values: output of :func:`load_config_file`
    :param flag_values: ``{section: {field: value}}`` for flags the user set
    :raises: :exc:`InvalidConfig` when a merged section fails validation
    """
    file_values = file_values or {}
    flag_values = flag_values or {}
    sections = {}
    for section, cls in SECTIONS.items():
        merged = dict(flag_values.get(section, {}))
        for key, value in file_values.get(section, {}).items():
            if key in merged and merged[key] != value:
                logging.warning("config file sets %s.%s = %r, overriding command-line value %r",
                                section, key, value, merged[key])
            merged[key] = value
        try:
            sections[section] = cls(**merged)
        except (ValueError, TypeError) as ex:
            raise InvalidConfig("invalid %s config: %s" % (section, ex))
    return PipelineConfig(**sections)


def load_config(config_file=None, flag_values=None):
    """
    ``config_file`` falls back to ``$BELTRACK_CONFIG``; with neither, only
    defaults and flags apply.

    :raises: :exc:`InvalidConfig`
    """
    if config_file is None:
        config_file = get_default_config_file()
    file_values = {}
    if config_file is not None:
        logging.info("loading config from %s", config_file)
        file_values = load_config_file(config_file)
    return build_config(file_values, flag_values)

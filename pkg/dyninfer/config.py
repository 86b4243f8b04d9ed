import configparser
import logging
import os
from os import path

log = logging.getLogger("dyninfer")

PATH = path.abspath(path.dirname(__file__))
ROOT = path.dirname(PATH)
DEFAULT_CONFIG_FILENAME = path.join(ROOT, "dyninfer.cfg")

SEED_ENV_VAR = "DYNINFER_SEED"

DEFAULTS = {
    "SOLVER": {
        "tie_break": "myopic",
        "tie_tolerance": "1e-9",
    },
    "SIMULATION": {
        "seed": "42",
        "rollouts": "10000",
        "trajectory_cap": "10000",
    },
    "ORACLE": {
        "strategy_limit": "1000000",
        "pair_limit": "10000000",
        "mode": "revealed",
        "method": "enumerate",
    },
    "OUTPUT": {
        "json_digits": "12",
        "dot_decimals": "4",
    },
}


def get_config(config_filename=None):
    dyn_config = configparser.ConfigParser(
        interpolation=configparser.ExtendedInterpolation(),
        allow_no_value=True,
        delimiters='=',
        inline_comment_prefixes='#'
    )
    dyn_config.read_dict(DEFAULTS)

    if not config_filename:
        config_filename = DEFAULT_CONFIG_FILENAME

    local_filename = config_filename.replace('.cfg', '_local.cfg')
    if path.isfile(local_filename):
        config_filename = local_filename

    if not path.isfile(config_filename):
        log.debug("no config file at %s, using built-in defaults" % config_filename)
        return dyn_config

    with open(config_filename, 'r') as file:
        dyn_config.read_file(file)

    log.debug("loaded config from %s" % config_filename)
    return dyn_config


def default_seed(config):
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed:
        return int(env_seed)
    return config.getint('SIMULATION', 'seed')

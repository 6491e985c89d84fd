#!/usr/bin/env python
"""
Test layer profiles: comm times, the text format and synthesis.
"""
import os

import numpy as np
import pytest

from dreamsched.analysis.profile import (LayerProfile, LinkModel, ModelProfile,
                                         ProfileError, comm_time, load_profile,
                                         save_profile, parse_profile,
                                         format_profile, synth_profile, HEADER)
from dreamsched.utils.shell import get_data_file

TESTDIR = os.path.dirname(os.path.abspath(__file__))
THREE_LAYER = os.path.join(TESTDIR,'three_layer.profile')
RESNET = get_data_file('resnet18_like.profile')

def test_comm_time():
    link = LinkModel(1e6,0.0)
    np.testing.assert_equal(comm_time(LayerProfile(1,'a',1000000,0,0),link),1.0)

    layer = LayerProfile(1,'a',1000000,0,0,t_comm_override=0.5)
    np.testing.assert_equal(comm_time(layer,link),0.5)
    np.testing.assert_equal(comm_time(layer,LinkModel(1.0,10.0)),0.5)

    layer = LayerProfile(1,'a',0,0,0)
    np.testing.assert_equal(comm_time(layer,LinkModel(1e9,0.001)),0.001)

    with pytest.raises(ProfileError):
        comm_time(LayerProfile(1,'a',None,0,0),link)

def test_comm_time_monotone():
    layer = LayerProfile(1,'a',5000,0,0)
    bigger = layer._replace(param_bytes=6000)
    link = LinkModel(1e4,0.01)
    assert comm_time(bigger,link) >= comm_time(layer,link)
    assert comm_time(layer,LinkModel(1e4,0.02)) >= comm_time(layer,link)
    assert comm_time(layer,LinkModel(2e4,0.01)) <= comm_time(layer,link)

def test_model_profile():
    profile = load_profile(THREE_LAYER)
    np.testing.assert_equal(profile.nlayers,3)
    np.testing.assert_equal(profile.label,'three_layer')
    np.testing.assert_equal(profile.t_bp,[1.0,1.0,1.0])
    np.testing.assert_equal(profile.t_comm,[2.0,2.0,2.0])
    np.testing.assert_equal(profile.totals(),(3.0,3.0,6.0))

    # Arrays are read-only
    with pytest.raises(ValueError):
        profile.t_bp[0] = 5.0

    scaled = profile.scale_comm(0.25)
    np.testing.assert_equal(scaled.t_comm,[0.5,0.5,0.5])
    np.testing.assert_equal(scaled.t_bp,profile.t_bp)

def test_invalid_profiles():
    link = LinkModel(1e9)
    with pytest.raises(ProfileError):
        ModelProfile([],link)

    layers = [LayerProfile(i,'l%i'%i,10,0.1,0.1) for i in range(1,7)]
    layers[5] = layers[5]._replace(index=5)
    with pytest.raises(ProfileError) as e:
        ModelProfile(layers,link)
    assert '5' in str(e.value)

    with pytest.raises(ProfileError):
        ModelProfile([LayerProfile(1,'a',10,-0.1,0.1)],link)
    with pytest.raises(ProfileError):
        ModelProfile([LayerProfile(2,'a',10,0.1,0.1)],link)
    with pytest.raises(ProfileError):
        ModelProfile([LayerProfile(1,'a',10,0.1,0.1)],LinkModel(0.0))

def test_parse_errors():
    good = [HEADER,'1\ta\t10\t1\t1\t-','link\t1000\t0']
    profile = parse_profile(good)
    np.testing.assert_equal(profile.t_comm,[0.01])

    with pytest.raises(ProfileError):
        parse_profile(good[1:])
    with pytest.raises(ProfileError):
        parse_profile(good[:2])
    with pytest.raises(ProfileError):
        parse_profile([HEADER,'1\ta\t10\tx\t1\t-','link\t1000\t0'])
    with pytest.raises(ProfileError):
        parse_profile([HEADER,'1\ta\t10\t1\t1','link\t1000\t0'])
    with pytest.raises(ProfileError):
        parse_profile([HEADER,'1\ta\t10\t1\t-1\t-','link\t1000\t0'])

def test_resnet_fixture():
    profile = load_profile(RESNET)
    np.testing.assert_equal(profile.nlayers,61)
    np.testing.assert_equal(profile.layer(61).name,'fc')
    assert np.all(profile.t_comm > 0)

def test_round_trip(tmp_path):
    for profile in [load_profile(RESNET),load_profile(THREE_LAYER),
                    synth_profile(20,3,'comm-heavy')]:
        path = str(tmp_path.joinpath(profile.label+'.profile'))
        save_profile(profile,path)
        other = load_profile(path)
        assert other == profile
        np.testing.assert_equal(other.t_comm,profile.t_comm)
        np.testing.assert_equal(format_profile(other),format_profile(profile))

def test_synth_profile():
    a = synth_profile(5,42,'balanced')
    b = synth_profile(5,42,'balanced')
    assert a == b
    np.testing.assert_equal(a.t_comm,b.t_comm)

    heavy = synth_profile(30,7,'comm-heavy')
    _,bp,comm = heavy.totals()
    assert comm/bp > 2

    light = synth_profile(30,7,'compute-heavy')
    _,bp,comm = light.totals()
    assert comm/bp < 0.5

    for seed in range(10):
        _,bp,comm = synth_profile(25,seed,'balanced').totals()
        assert 0.8 <= comm/bp <= 1.2

    single = synth_profile(1,0,'balanced')
    np.testing.assert_equal(single.nlayers,1)

    with pytest.raises(ValueError):
        synth_profile(0,0)
    with pytest.raises(ValueError):
        synth_profile(5,0,'unknown')

if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description=__doc__)
    args = parser.parse_args()

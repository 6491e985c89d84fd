"""
Export of simulated timelines in the browser trace-event format
(chrome://tracing, Perfetto).
"""
import io
import json

from dreamsched.utils.logger import logger
from dreamsched.utils.shell import mkdirs_for
from dreamsched.simulation.simulator import ALL

def _us(seconds):
    # round() is half-to-even
    return int(round(seconds*1e6))

def event_name(event):
    if event.layer == ALL: return event.kind
    return '%s(%s)'%(event.kind,event.layer)

def trace_record(event, pid):
    """ Complete ('X') record of one Event with microsecond timestamps. """
    ts = _us(event.start)
    return {'name': event_name(event),
            'cat': event.kind,
            'ph': 'X',
            'ts': ts,
            'dur': _us(event.end) - ts,
            'pid': pid,
            'tid': event.lane,
            'args': {'layer': event.layer, 'iteration': event.iteration}}

def trace_events(timeline):
    return {'traceEvents': [trace_record(e,timeline.mode) for e in timeline],
            'displayTimeUnit': 'ms'}

def export_trace(timeline, path):
    """
    Write a timeline as a trace-event JSON file.

    Parameters:
    -----------
    timeline : Timeline
    path     : output filename

    Returns:
    --------
    None
    """
    data = trace_events(timeline)
    try:
        mkdirs_for(path)
        logger.info("Writing %s..."%path)
        with io.open(path,'w',encoding='utf-8') as out:
            out.write(json.dumps(data))
    except (IOError,OSError) as e:
        msg = "Could not write trace %s: %s"%(path,e)
        raise IOError(msg)

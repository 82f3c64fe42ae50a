import os

from watchdog.events import FileCreatedEvent, FileModifiedEvent, FileMovedEvent

from offload_feasibility.trace_monitor import TraceEventHandler, TraceMonitor


def _handler(watch_path, seen):
    return TraceEventHandler(str(watch_path), seen.append, debounce_interval=60.0)


def test_burst_of_changes_reported_once(tmp_path):
    trace = tmp_path / "jobs.csv"
    trace.write_text("", encoding="utf-8")
    seen = []
    handler = _handler(tmp_path, seen)

    handler.dispatch(FileCreatedEvent(str(trace)))
    handler.dispatch(FileModifiedEvent(str(trace)))
    handler.dispatch(FileModifiedEvent(str(trace)))
    assert seen == []

    flushed = handler.flush()
    handler.cancel()
    assert flushed == [os.path.realpath(trace)]
    assert seen == [os.path.realpath(trace)]
    assert handler.flush() == []


def test_non_trace_files_are_ignored(tmp_path):
    seen = []
    handler = _handler(tmp_path, seen)
    handler.dispatch(FileModifiedEvent(str(tmp_path / "notes.txt")))
    handler.dispatch(FileModifiedEvent(str(tmp_path / "jobs.csv.swp")))
    assert handler.flush() == []
    handler.cancel()


def test_single_file_watch_ignores_siblings(tmp_path):
    target = tmp_path / "jobs.csv"
    target.write_text("", encoding="utf-8")
    seen = []
    handler = _handler(target, seen)
    handler.dispatch(FileModifiedEvent(str(tmp_path / "other.csv")))
    handler.dispatch(FileModifiedEvent(str(target)))
    assert handler.flush() == [os.path.realpath(target)]
    handler.cancel()


def test_move_reports_destination(tmp_path):
    seen = []
    handler = _handler(tmp_path, seen)
    handler.dispatch(FileMovedEvent(str(tmp_path / "jobs.tmp"), str(tmp_path / "jobs.csv")))
    assert handler.flush() == [os.path.realpath(tmp_path / "jobs.csv")]
    handler.cancel()


def test_failing_callback_does_not_stop_flush(tmp_path):
    calls = []

    def callback(path):
        calls.append(path)
        raise RuntimeError("boom")

    handler = TraceEventHandler(str(tmp_path), callback, debounce_interval=60.0)
    handler.dispatch(FileModifiedEvent(str(tmp_path / "a.csv")))
    handler.dispatch(FileModifiedEvent(str(tmp_path / "b.csv")))
    assert len(handler.flush()) == 2
    assert len(calls) == 2
    handler.cancel()


def test_monitor_start_and_stop(tmp_path):
    monitor = TraceMonitor(str(tmp_path), lambda path: None, use_polling_observer=True, debounce_interval=0.1)
    monitor.start_monitoring()
    monitor.start_monitoring()
    monitor.stop_monitoring()
    monitor.stop_monitoring()
    assert not monitor.observer.is_alive()

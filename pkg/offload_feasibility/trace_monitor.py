import os
import threading
import time
from collections import OrderedDict
from typing import Callable, List, Optional

from watchdog.events import FileSystemEvent, PatternMatchingEventHandler
from watchdog.observers import Observer
from watchdog.observers.polling import PollingObserver

from .offload_config import DEFAULT_DEBOUNCE_SECONDS, offload_log


class TraceEventHandler(PatternMatchingEventHandler):
    """Collects trace CSV changes and reports each changed file once per burst."""

    def __init__(
        self,
        watch_path: str,
        callback: Callable[[str], None],
        debounce_interval: float = DEFAULT_DEBOUNCE_SECONDS,
    ) -> None:
        super().__init__(patterns=["*.csv"], ignore_directories=True, case_sensitive=False)
        self.watch_path = os.path.realpath(watch_path)
        self.watch_is_file = os.path.isfile(self.watch_path) or self.watch_path.lower().endswith(".csv")
        self.callback = callback
        self.debounce_interval = max(0.0, debounce_interval)
        self.debounce_timer: Optional[threading.Timer] = None
        self.pending: "OrderedDict[str, None]" = OrderedDict()
        self.pending_lock = threading.Lock()

    # Event ingestion -----------------------------------------------------------------

    def on_any_event(self, event: FileSystemEvent) -> None:
        if event.is_directory:
            return
        if event.event_type not in ("created", "modified", "moved"):
            return

        path = getattr(event, "dest_path", None) if event.event_type == "moved" else event.src_path
        if not path:
            return
        real_path = os.path.realpath(path)
        if not self._is_watched(real_path) or self._is_temp_file(real_path):
            return

        offload_log(f"TraceMonitor: detected {event.event_type}: {real_path}")
        with self.pending_lock:
            self.pending[real_path] = None
        self._schedule_flush()

    # Debounce & flushing -------------------------------------------------------------

    def _schedule_flush(self) -> None:
        if self.debounce_timer and self.debounce_timer.is_alive():
            self.debounce_timer.cancel()
        self.debounce_timer = threading.Timer(self.debounce_interval, self.flush)
        self.debounce_timer.daemon = True
        self.debounce_timer.start()

    def flush(self) -> List[str]:
        """Hand every pending path to the callback; returns the paths handled."""
        with self.pending_lock:
            paths = list(self.pending)
            self.pending.clear()
        for path in paths:
            try:
                self.callback(path)
            except Exception as exc:
                offload_log(f"TraceMonitor: callback failed for {path}: {exc}")
        return paths

    def cancel(self) -> None:
        if self.debounce_timer and self.debounce_timer.is_alive():
            self.debounce_timer.cancel()
        self.debounce_timer = None

    # Utility helpers -----------------------------------------------------------------

    def _is_watched(self, path: str) -> bool:
        if self.watch_is_file:
            return path == self.watch_path
        try:
            return os.path.commonpath([self.watch_path, path]) == self.watch_path
        except ValueError:
            return False

    @staticmethod
    def _is_temp_file(path: str) -> bool:
        lower = path.lower()
        return lower.endswith((".swp", ".tmp", "~"))


class TraceMonitor:
    """Watches a trace file (or a directory of traces) and re-runs a callback on change."""

    def __init__(
        self,
        watch_path: str,
        callback: Callable[[str], None],
        use_polling_observer: bool = False,
        debounce_interval: float = DEFAULT_DEBOUNCE_SECONDS,
        interval: float = 1.0,
    ) -> None:
        self.watch_path = os.path.realpath(watch_path)
        self.interval = interval
        self.observer = PollingObserver() if use_polling_observer else Observer()
        self.event_handler = TraceEventHandler(self.watch_path, callback, debounce_interval)
        self._running = False

    def start_monitoring(self) -> None:
        if self._running:
            offload_log("TraceMonitor: already running.")
            return
        directory = self.watch_path if os.path.isdir(self.watch_path) else os.path.dirname(self.watch_path)
        self.observer.schedule(self.event_handler, directory, recursive=False)
        self.observer.start()
        self._running = True
        offload_log(f"TraceMonitor: watching {self.watch_path}")

    def stop_monitoring(self) -> None:
        if not self._running:
            return
        self.event_handler.cancel()
        self.observer.stop()
        if self.observer.is_alive():
            self.observer.join()
        self._running = False
        offload_log("TraceMonitor: stopped.")

    def run_forever(self) -> None:
        self.start_monitoring()
        try:
            while True:
                time.sleep(self.interval)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop_monitoring()

"""The controller's data-point event stream."""

from __future__ import annotations

from typing import Callable, Generic, TypeVar

T = TypeVar("T")
Listener = Callable[[T], None]


class EventStream(Generic[T]):
    """One primary consumer (the data manager) plus any number of observers.

    The primary consumer sees each event first; observers follow in
    subscription order. Delivery is synchronous, so emission order is
    preserved for everyone.
    """

    def __init__(self) -> None:
        self._primary: Listener | None = None
        self._observers: list[Listener] = []
        self.published = 0

    def listen(self, fn: Listener, primary: bool = False) -> Callable[[], None]:
        """Subscribe ``fn``; returns a function that unsubscribes it."""
        if primary:
            if self._primary is not None:
                raise ValueError("event stream already has a primary consumer")
            self._primary = fn
        else:
            self._observers.append(fn)

        def cancel() -> None:
            if self._primary is fn:
                self._primary = None
            elif fn in self._observers:
                self._observers.remove(fn)

        return cancel

    def publish(self, event: T) -> None:
        self.published += 1
        if self._primary is not None:
            self._primary(event)
        for fn in list(self._observers):
            fn(event)

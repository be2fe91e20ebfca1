package org.joda.time.base;

import org.joda.time.Chronology;

public abstract class BaseDateTime {

    private volatile long iMillis;
    private volatile Chronology iChronology;

    public BaseDateTime(long instant, Chronology chronology) {
        iChronology = checkChronology(chronology);
        iMillis = checkInstant(instant, iChronology);
    }

    protected Chronology checkChronology(Chronology chronology) {
        if (chronology == null) {
            throw new IllegalArgumentException("Chronology must not be null");
        }
        return chronology;
    }

    protected long checkInstant(long instant, Chronology chronology) {
        return instant;
    }

    public long getMillis() {
        return iMillis;
    }

    public Chronology getChronology() {
        return iChronology;
    }
}

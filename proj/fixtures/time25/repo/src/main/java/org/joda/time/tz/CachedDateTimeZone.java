package org.joda.time.tz;

import org.joda.time.DateTimeZone;

/**
 * Improves the performance of requesting time zone offsets and name keys by
 * caching the results.
 */
public class CachedDateTimeZone extends DateTimeZone {

    private static final int cInfoCacheMask = 511;

    public static CachedDateTimeZone forZone(DateTimeZone zone) {
        if (zone instanceof CachedDateTimeZone) {
            return (CachedDateTimeZone) zone;
        }
        return new CachedDateTimeZone(zone);
    }

    private final DateTimeZone iZone;
    private final Info[] iInfoCache = new Info[cInfoCacheMask + 1];

    private CachedDateTimeZone(DateTimeZone zone) {
        super(zone.getID());
        iZone = zone;
    }

    public String getNameKey(long instant) {
        return iZone.getNameKey(instant);
    }

    public int getOffset(long instant) {
        return getInfo(instant).getOffset(instant);
    }

    public int getStandardOffset(long instant) {
        return iZone.getStandardOffset(instant);
    }

    public boolean isFixed() {
        return iZone.isFixed();
    }

    public long nextTransition(long instant) {
        return iZone.nextTransition(instant);
    }

    public long previousTransition(long instant) {
        return iZone.previousTransition(instant);
    }

    public boolean equals(Object obj) {
        if (this == obj) {
            return true;
        }
        if (obj instanceof CachedDateTimeZone) {
            return iZone.equals(((CachedDateTimeZone) obj).iZone);
        }
        return false;
    }

    private Info getInfo(long millis) {
        int period = (int) (millis >> 32);
        Info[] cache = iInfoCache;
        int index = period & cInfoCacheMask;
        Info info = cache[index];
        if (info == null || (int) ((info.iPeriodStart >> 32)) != period) {
            info = new Info(iZone, period & (0xffffffffL << 32));
            cache[index] = info;
        }
        return info;
    }

    private static final class Info {
        public final long iPeriodStart;
        public final DateTimeZone iZoneRef;

        Info(DateTimeZone zone, long periodStart) {
            iPeriodStart = periodStart;
            iZoneRef = zone;
        }

        public int getOffset(long millis) {
            return iZoneRef.getOffset(millis);
        }
    }
}
